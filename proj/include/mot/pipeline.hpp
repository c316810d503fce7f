#pragma once

#include <span>
#include <vector>

#include "mot/appearance.hpp"
#include "mot/camera.hpp"
#include "mot/config.hpp"
#include "mot/model.hpp"

namespace mot {

// In-memory versions of the CLI stages. Chaining them equals chaining the
// subcommands through files.

struct TrackStageOutput {
  std::vector<Tracklet> tracklets;
  EmbeddingStore embeddings;  // keyed by (frame, tracklet id)
};

// `embeddings` may be null (motion-only association, linking disabled unless
// appearance is switched off).
TrackStageOutput run_track_stage(std::span<const Detection> detections,
                                 const EmbeddingStore* embeddings,
                                 const TransformTable& transforms, const RunConfig& config);

// Online tracklets as final results: class votes only.
std::vector<Trajectory> online_results(std::span<const Tracklet> tracklets,
                                       const RunConfig& config);

std::vector<Trajectory> run_link_stage(std::span<const Tracklet> tracklets,
                                       const EmbeddingStore* tracklet_embeddings,
                                       const RunConfig& config);

// Class votes, split into single-label trajectories, then the enabled
// post-processing stages.
std::vector<Trajectory> run_post_stage(std::span<const Trajectory> trajectories,
                                       const RunConfig& config);

std::vector<Trajectory> run_fuse_stage(std::span<const std::vector<Trajectory>> result_sets,
                                       const RunConfig& config);

}  // namespace mot
