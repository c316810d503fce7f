#pragma once

#include <span>
#include <vector>

#include "mot/model.hpp"

namespace mot {

enum class PostStage { kDenoise, kInterpolate, kRescore };

struct PostConfig {
  int max_gap = 60;                 // fill only gaps with fewer missing frames
  double tau = 25.0;                // rescoring temperature
  double nms_overlap_floor = 0.3;   // tube IoU above which a trajectory is decayed
  double score_drop_floor = 0.05;   // mean score below which it is removed
  bool denoise = true;
  bool interpolate = true;
  bool rescore = true;
  std::vector<PostStage> order = {PostStage::kDenoise, PostStage::kInterpolate,
                                  PostStage::kRescore};

  void validate() const;
};

// Linear soft suppression between same-label trajectories ranked by mean
// score: the best remaining trajectory is kept and every other one whose tube
// IoU with it exceeds nms_overlap_floor has its scores multiplied by
// (1 - IoU); trajectories whose mean score drops below score_drop_floor are
// removed. Boxes are never modified. Output is in keep order.
std::vector<Trajectory> denoise(std::span<const Trajectory> trajectories, const PostConfig& config);

// Fills every gap of fewer than max_gap missing frames with linearly
// interpolated boxes and scores; inserted entries are flagged interpolated.
Trajectory interpolate(const Trajectory& trajectory, int max_gap);

// (1 - exp(-l / tau)) / (1 + exp(-l / tau)) = tanh(l / (2 tau)).
double rescore_weight(double length, double tau);

// Scales every frame score by rescore_weight(number of entries, tau).
Trajectory rescore(const Trajectory& trajectory, double tau);

// Fuses result sets: pools all trajectories, ranks them by summed frame
// score, runs the same soft suppression as denoise per label, and reassigns
// ids 1..n in keep order.
std::vector<Trajectory> tracknms(std::span<const std::vector<Trajectory>> result_sets,
                                 const PostConfig& config);

// Runs the enabled stages in config.order on single-label trajectories.
std::vector<Trajectory> post_process(std::span<const Trajectory> trajectories,
                                     const PostConfig& config);

}  // namespace mot
