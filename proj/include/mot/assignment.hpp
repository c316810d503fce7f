#pragma once

#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mot {

inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

struct AssignmentResult {
  std::vector<std::pair<int, int>> matches;  // (row, col), ascending by row
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
};

// Rectangular linear assignment (Hungarian method with potentials).
// Cells with cost >= infeasible_mark, or NaN, are infeasible and never
// returned. Among matchings using only feasible cells, the result has the
// largest number of pairs and, among those, the smallest total cost.
// Equal-cost alternatives resolve deterministically.
AssignmentResult solve_assignment(const Eigen::MatrixXd& cost,
                                  double infeasible_mark = kInfeasible);

}  // namespace mot
