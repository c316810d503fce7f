#pragma once

#include <span>
#include <string>
#include <vector>

#include "mot/model.hpp"

namespace mot {

struct ClassEval {
  int class_id = 0;
  int num_ground_truth = 0;
  int num_predictions = 0;
  std::vector<double> ap;     // one per threshold
  std::vector<int> matched;   // true positives per threshold
  std::vector<int> missed;    // ground-truth trajectories left unmatched per threshold
};

struct EvalReport {
  std::vector<double> thresholds;
  std::vector<ClassEval> classes;  // classes present in the ground truth, ascending
  double map = 0.0;                // mean over the whole (class, threshold) AP table

  // AP averaged over classes at one threshold.
  double map_at(double threshold) const;
  double ap(int class_id, double threshold) const;

  std::string to_table() const;
  // Lines of `key=value`: map, map@<thr>, ap.<class>@<thr>, matched.<class>@<thr>,
  // missed.<class>@<thr>.
  std::string to_key_values() const;
};

inline const std::vector<double> kDefaultEvalThresholds = {0.25, 0.5, 0.75};

// Trajectory-level AP. Per class and threshold, predictions ranked by mean
// frame score (descending, ties by input order) are greedily matched to the
// unmatched ground-truth trajectory of highest tube IoU and count as true
// positives when that IoU reaches the threshold. AP integrates the
// all-points interpolated precision-recall curve. Multi-vote and unvoted
// inputs are split into single-label trajectories first. Throws InputError
// when the ground truth is empty.
EvalReport evaluate(std::span<const Trajectory> predictions,
                    std::span<const Trajectory> ground_truth,
                    std::span<const double> thresholds = kDefaultEvalThresholds);

}  // namespace mot
