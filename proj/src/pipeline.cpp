#include "mot/pipeline.hpp"

#include "mot/globallink.hpp"
#include "mot/online.hpp"
#include "mot/postprocess.hpp"

namespace mot {

TrackStageOutput run_track_stage(std::span<const Detection> detections,
                                 const EmbeddingStore* embeddings,
                                 const TransformTable& transforms, const RunConfig& config) {
  TrackStageOutput out;
  out.tracklets = track_sequence(detections, embeddings, transforms, config.online);
  if (embeddings != nullptr) {
    out.embeddings = tracklet_embeddings(out.tracklets, *embeddings);
  }
  return out;
}

std::vector<Trajectory> online_results(std::span<const Tracklet> tracklets,
                                       const RunConfig& config) {
  std::vector<Trajectory> trajectories;
  trajectories.reserve(tracklets.size());
  for (const auto& tl : tracklets) trajectories.push_back(to_trajectory(tl));
  return rough2fine(trajectories, config.vote);
}

std::vector<Trajectory> run_link_stage(std::span<const Tracklet> tracklets,
                                       const EmbeddingStore* tracklet_embeddings,
                                       const RunConfig& config) {
  LinkConfig link = config.link;
  link.vote = config.vote;
  if (tracklet_embeddings == nullptr || tracklet_embeddings->size() == 0) {
    return global_link(tracklets, nullptr, link);
  }
  MeanClipProvider clips(*tracklet_embeddings);
  return global_link(tracklets, &clips, link);
}

std::vector<Trajectory> run_post_stage(std::span<const Trajectory> trajectories,
                                       const RunConfig& config) {
  const auto voted = rough2fine(trajectories, config.vote);
  const auto single = split_by_class(voted);
  return post_process(single, config.post);
}

std::vector<Trajectory> run_fuse_stage(std::span<const std::vector<Trajectory>> result_sets,
                                       const RunConfig& config) {
  std::vector<std::vector<Trajectory>> single;
  single.reserve(result_sets.size());
  for (const auto& set : result_sets) single.push_back(split_by_class(set));
  return tracknms(single, config.post);
}

}  // namespace mot
