#include "radarcam/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace radarcam {

namespace {

struct SubValue {
  std::size_t matched = 0;
  double cost = 0.0;
};

bool value_eq(double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a) + std::abs(b)); }

// Min-cost perfect matching on the square padding of the active sub-matrix
// (potentials method). Padding and ineligible entries share one large finite
// cost exceeding any possible real total, which makes the minimum
// simultaneously max-cardinality over the eligible entries.
SubValue hungarian(const Eigen::MatrixXd& cost, const std::vector<int>& rows,
                   const std::vector<int>& cols) {
  const int nr = static_cast<int>(rows.size());
  const int nc = static_cast<int>(cols.size());
  const int n = std::max(nr, nc);
  if (n == 0) return {};

  double max_cost = 0.0;
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j) {
      const double c = cost(rows[i], cols[j]);
      if (std::isfinite(c)) max_cost = std::max(max_cost, c);
    }
  const double big = (max_cost + 1.0) * (n + 1.0);

  auto entry = [&](int i, int j) -> double {
    if (i >= nr || j >= nc) return big;
    const double c = cost(rows[i], cols[j]);
    return std::isfinite(c) ? c : big;
  };

  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0);  // match[j] = row (1-based) assigned to column j
  std::vector<int> way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::max());
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      int j1 = -1;
      double delta = std::numeric_limits<double>::max();
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = entry(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }

  SubValue out;
  for (int j = 1; j <= n; ++j) {
    const int i = match[j] - 1;
    if (i < nr && j - 1 < nc && std::isfinite(cost(rows[i], cols[j - 1]))) {
      ++out.matched;
      out.cost += cost(rows[i], cols[j - 1]);
    }
  }
  return out;
}

void erase_value(std::vector<int>& v, int x) { v.erase(std::find(v.begin(), v.end(), x)); }

}  // namespace

Assignment solve_assignment(const Eigen::MatrixXd& cost) {
  const int n_rows = static_cast<int>(cost.rows());
  const int n_cols = static_cast<int>(cost.cols());
  std::vector<int> rem_rows(n_rows), rem_cols(n_cols);
  std::iota(rem_rows.begin(), rem_rows.end(), 0);
  std::iota(rem_cols.begin(), rem_cols.end(), 0);

  const SubValue base = hungarian(cost, rem_rows, rem_cols);

  Assignment out;
  out.row_to_col.assign(static_cast<std::size_t>(n_rows), -1);

  // Fix pairs row by row, column by column, keeping the remaining subproblem
  // able to complete the global optimum. This realizes the lexicographic
  // tie-break without disturbing optimality.
  std::size_t committed_n = 0;
  double committed_cost = 0.0;
  for (int r = 0; r < n_rows; ++r) {
    erase_value(rem_rows, r);
    for (std::size_t k = 0; k < rem_cols.size(); ++k) {
      const int c = rem_cols[k];
      if (!std::isfinite(cost(r, c))) continue;
      std::vector<int> cols_minus = rem_cols;
      cols_minus.erase(cols_minus.begin() + static_cast<std::ptrdiff_t>(k));
      const SubValue sub = hungarian(cost, rem_rows, cols_minus);
      if (committed_n + 1 + sub.matched == base.matched &&
          value_eq(committed_cost + cost(r, c) + sub.cost, base.cost)) {
        out.row_to_col[static_cast<std::size_t>(r)] = c;
        committed_cost += cost(r, c);
        ++committed_n;
        rem_cols = std::move(cols_minus);
        break;
      }
    }
  }

  out.matched = committed_n;
  out.total_cost = committed_cost;
  return out;
}

}  // namespace radarcam
