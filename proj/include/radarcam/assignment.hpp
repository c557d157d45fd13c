#ifndef RADARCAM_ASSIGNMENT_HPP
#define RADARCAM_ASSIGNMENT_HPP

#include <limits>
#include <vector>

#include <Eigen/Core>

namespace radarcam {

/// Marks a (row, column) pair that must not be assigned.
inline constexpr double kUnassignable = std::numeric_limits<double>::infinity();

struct Assignment {
  std::vector<int> row_to_col;  // -1 when the row stays unmatched
  std::size_t matched = 0;
  double total_cost = 0.0;  // over matched pairs only
};

/// One-to-one assignment over the finite entries of a rectangular cost
/// matrix: maximizes the number of matched pairs, then minimizes their total
/// cost. Among cost-equal optima the (row, column)-lexicographically smallest
/// matching is returned, so results are reproducible.
Assignment solve_assignment(const Eigen::MatrixXd& cost);

}  // namespace radarcam

#endif  // RADARCAM_ASSIGNMENT_HPP
