#ifndef RADARCAM_ERRORS_HPP
#define RADARCAM_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace radarcam {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// geometry
class ZeroRange : public Error {
 public:
  using Error::Error;
};

class DegenerateDepth : public Error {
 public:
  explicit DegenerateDepth(const std::string& msg, std::size_t index = npos)
      : Error(msg), index_(index) {}
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// calibration
class InsufficientCorrespondences : public Error {
 public:
  using Error::Error;
};

class DegenerateConfiguration : public Error {
 public:
  using Error::Error;
};

class NoConsensus : public Error {
 public:
  using Error::Error;
};

// stream sync
class UnsortedInput : public Error {
 public:
  using Error::Error;
};

// tracking
class SingularInnovation : public Error {
 public:
  using Error::Error;
};

class NonMonotoneTime : public Error {
 public:
  using Error::Error;
};

// consistency
class NonPositiveRange : public Error {
 public:
  using Error::Error;
};

// simulator
class InvalidScene : public Error {
 public:
  using Error::Error;
};

/// Parse error carrying the 1-based line number of the offending line.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line) : Error(msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class MalformedLine : public ParseError {
 public:
  using ParseError::ParseError;
};

class UnsortedTimestamps : public ParseError {
 public:
  using ParseError::ParseError;
};

class SchemaViolation : public ParseError {
 public:
  SchemaViolation(const std::string& msg, std::size_t line, std::string field = {})
      : ParseError(msg, line), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace radarcam

#endif  // RADARCAM_ERRORS_HPP
