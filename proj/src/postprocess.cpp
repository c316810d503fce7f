#include "mot/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "mot/errors.hpp"

namespace mot {

void PostConfig::validate() const {
  if (max_gap < 0) throw InputError("post config: max_gap must be >= 0");
  if (!(tau > 0.0)) throw InputError("post config: tau must be positive");
  if (!(nms_overlap_floor >= 0.0 && nms_overlap_floor <= 1.0)) {
    throw InputError("post config: nms_overlap_floor must lie in [0, 1]");
  }
  if (!(score_drop_floor >= 0.0)) throw InputError("post config: score_drop_floor must be >= 0");
}

namespace {

using RankKey = std::function<double(const Trajectory&)>;

// Keep order of one label group under soft suppression.
void suppress_group(std::vector<Trajectory> pool, const RankKey& key, const PostConfig& config,
                    std::vector<Trajectory>& kept) {
  while (!pool.empty()) {
    std::size_t best = 0;
    double best_key = key(pool[0]);
    for (std::size_t k = 1; k < pool.size(); ++k) {
      const double v = key(pool[k]);
      if (v > best_key) {
        best = k;
        best_key = v;
      }
    }
    Trajectory top = std::move(pool[best]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
    for (auto& other : pool) {
      const double overlap = tube_iou(top, other);
      if (overlap <= config.nms_overlap_floor) continue;
      const double decay = 1.0 - overlap;
      for (auto& e : other.entries) e.score *= decay;
    }
    std::erase_if(pool, [&](const Trajectory& t) {
      return mean_score(t.entries) < config.score_drop_floor;
    });
    kept.push_back(std::move(top));
  }
}

std::vector<Trajectory> soft_suppress(std::span<const Trajectory> trajectories, const RankKey& key,
                                      const PostConfig& config) {
  // Groups keep input order, so equal keys resolve to the earlier trajectory.
  std::map<int, std::vector<Trajectory>> groups;
  for (const auto& t : trajectories) groups[label_of(t)].push_back(t);
  std::vector<Trajectory> kept;
  for (auto& [label, group] : groups) suppress_group(std::move(group), key, config, kept);
  return kept;
}

}  // namespace

std::vector<Trajectory> denoise(std::span<const Trajectory> trajectories, const PostConfig& config) {
  return soft_suppress(
      trajectories, [](const Trajectory& t) { return mean_score(t.entries); }, config);
}

Trajectory interpolate(const Trajectory& trajectory, int max_gap) {
  Trajectory out = trajectory;
  out.entries.clear();
  const auto& src = trajectory.entries;
  for (std::size_t k = 0; k < src.size(); ++k) {
    if (k > 0) {
      const TrackEntry& a = src[k - 1];
      const TrackEntry& b = src[k];
      const int missing = b.frame - a.frame - 1;
      if (missing >= 1 && missing < max_gap) {
        const double span = static_cast<double>(b.frame - a.frame);
        for (int f = a.frame + 1; f < b.frame; ++f) {
          const double w = static_cast<double>(f - a.frame) / span;
          TrackEntry e;
          e.frame = f;
          e.box.left = a.box.left + w * (b.box.left - a.box.left);
          e.box.top = a.box.top + w * (b.box.top - a.box.top);
          e.box.width = a.box.width + w * (b.box.width - a.box.width);
          e.box.height = a.box.height + w * (b.box.height - a.box.height);
          e.score = a.score + w * (b.score - a.score);
          e.class_id = a.class_id;
          e.interpolated = true;
          out.entries.push_back(e);
        }
      }
    }
    out.entries.push_back(src[k]);
  }
  return out;
}

double rescore_weight(double length, double tau) {
  if (!(tau > 0.0)) throw InputError("rescore_weight: tau must be positive");
  if (!(length >= 0.0)) throw InputError("rescore_weight: length must be non-negative");
  return std::tanh(length / (2.0 * tau));
}

Trajectory rescore(const Trajectory& trajectory, double tau) {
  Trajectory out = trajectory;
  const double w = rescore_weight(static_cast<double>(out.entries.size()), tau);
  for (auto& e : out.entries) e.score *= w;
  return out;
}

std::vector<Trajectory> tracknms(std::span<const std::vector<Trajectory>> result_sets,
                                 const PostConfig& config) {
  std::vector<Trajectory> pool;
  for (const auto& set : result_sets) pool.insert(pool.end(), set.begin(), set.end());
  std::vector<Trajectory> kept = soft_suppress(
      pool, [](const Trajectory& t) { return total_score(t.entries); }, config);
  int next_id = 1;
  for (auto& t : kept) t.id = next_id++;
  return kept;
}

std::vector<Trajectory> post_process(std::span<const Trajectory> trajectories,
                                     const PostConfig& config) {
  config.validate();
  std::vector<Trajectory> current(trajectories.begin(), trajectories.end());
  for (PostStage stage : config.order) {
    switch (stage) {
      case PostStage::kDenoise:
        if (config.denoise) current = denoise(current, config);
        break;
      case PostStage::kInterpolate:
        if (config.interpolate) {
          for (auto& t : current) t = interpolate(t, config.max_gap);
        }
        break;
      case PostStage::kRescore:
        if (config.rescore) {
          for (auto& t : current) t = rescore(t, config.tau);
        }
        break;
    }
  }
  return current;
}

}  // namespace mot
