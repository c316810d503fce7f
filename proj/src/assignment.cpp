#include "mot/assignment.hpp"

#include <algorithm>
#include <cmath>

namespace mot {

namespace {

bool feasible(double c, double mark) { return !std::isnan(c) && c < mark; }

// Kuhn-Munkres with row/column potentials for n <= m; returns the column
// assigned to each row.
std::vector<int> hungarian(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

AssignmentResult solve_assignment(const Eigen::MatrixXd& cost, double infeasible_mark) {
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  AssignmentResult result;

  // Infeasible cells get a penalty larger than any difference in feasible
  // totals, so the optimum uses as few of them as possible.
  double max_abs = 0.0;
  bool any_feasible = false;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (feasible(cost(i, j), infeasible_mark)) {
        any_feasible = true;
        max_abs = std::max(max_abs, std::abs(cost(i, j)));
      }
    }
  }

  std::vector<char> row_used(rows, 0), col_used(cols, 0);
  if (any_feasible) {
    const bool transpose = rows > cols;
    const int n = transpose ? cols : rows;
    const int m = transpose ? rows : cols;
    const double penalty = 2.0 * (max_abs + 1.0) * (n + 1);
    Eigen::MatrixXd work(n, m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        const double c = transpose ? cost(j, i) : cost(i, j);
        work(i, j) = feasible(c, infeasible_mark) ? c : penalty;
      }
    }
    const std::vector<int> assigned = hungarian(work);
    for (int i = 0; i < n; ++i) {
      const int j = assigned[i];
      if (j < 0) continue;
      const int r = transpose ? j : i;
      const int c = transpose ? i : j;
      if (!feasible(cost(r, c), infeasible_mark)) continue;
      result.matches.emplace_back(r, c);
      row_used[r] = 1;
      col_used[c] = 1;
    }
    std::sort(result.matches.begin(), result.matches.end());
  }
  for (int i = 0; i < rows; ++i) {
    if (!row_used[i]) result.unmatched_rows.push_back(i);
  }
  for (int j = 0; j < cols; ++j) {
    if (!col_used[j]) result.unmatched_cols.push_back(j);
  }
  return result;
}

}  // namespace mot
