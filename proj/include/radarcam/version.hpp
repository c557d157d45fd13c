#ifndef RADARCAM_VERSION_HPP
#define RADARCAM_VERSION_HPP

namespace radarcam {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace radarcam

#endif  // RADARCAM_VERSION_HPP
