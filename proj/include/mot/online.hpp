#pragma once

#include <map>
#include <span>
#include <vector>

#include "mot/appearance.hpp"
#include "mot/camera.hpp"
#include "mot/model.hpp"
#include "mot/motion.hpp"

namespace mot {

enum class FilterKind { kKalman, kUnscented };

struct FilterSetup {
  NoiseMode noise_mode = NoiseMode::kNsa;
  FilterKind kind = FilterKind::kKalman;
  MotionModel model;
};

struct OnlineConfig {
  int n_init = 3;
  int max_age = 30;
  int min_len = 2;
  double gate_threshold = 9.4877;         // chi-square 0.95 quantile, 4 DOF
  double appearance_threshold = 0.3;      // max cosine cost in the cascade
  double iou_fallback_threshold = 0.7;    // max (1 - IoU) in the fallback pass
  std::size_t bank_capacity = 100;
  double ema_momentum = 0.9;
  ClassMap classes = ClassMap::visdrone_default();
  // Filter per rough class; rough classes without an entry use FilterSetup{}.
  std::map<int, FilterSetup> filters = {
      {kRoughPerson, {NoiseMode::kNsa, FilterKind::kKalman, {}}},
      {kRoughVehicle, {NoiseMode::kNsa, FilterKind::kUnscented, {}}},
  };
  NoiseConfig noise;
  UkfParams ukf;

  const FilterSetup& filter_for(int rough_class) const;
  // Throws InputError on non-positive thresholds or counts.
  void validate() const;
};

enum class TrackStatus { kTentative, kConfirmed, kDeleted };

struct TrackRuntime {
  int id = 0;
  TrackState state;
  EmaBank bank{100, 0.9};
  TrackStatus status = TrackStatus::kTentative;
  int hits = 0;
  int misses = 0;  // consecutive frames without a matched detection
  int rough_class = 0;
  bool ever_confirmed = false;
  std::vector<TrackEntry> entries;
};

struct FrameAssociation {
  std::vector<std::pair<int, int>> matches;  // (track index, detection index)
  std::vector<int> unmatched_tracks;
  std::vector<int> unmatched_detections;
};

// Matches predicted (and camera-compensated) tracks to one frame's
// detections. Confirmed tracks go through a cascade ordered by misses
// (fewest first) on appearance cost, with gating; the remaining tentative
// tracks and confirmed tracks updated on the previous frame then compete for
// the remaining detections on 1 - IoU. Pairs of different rough classes are
// never matched. `embeddings` is parallel to `detections` (nullptr when
// missing); a missing embedding falls back to a gate-only cost.
FrameAssociation associate_frame(std::span<const TrackRuntime> tracks,
                                 std::span<const Detection> detections,
                                 std::span<const Embedding* const> embeddings,
                                 const OnlineConfig& config);

class OnlineTracker {
 public:
  explicit OnlineTracker(OnlineConfig config);

  // Advances to `frame` (strictly after the previous call). `camera` maps the
  // previous frame into this one; nullptr means identity.
  void step(int frame, std::span<const Detection> detections, const EmbeddingProvider* embeddings,
            const AffineTransform* camera);

  // Tracklets of every track that was ever confirmed and has at least
  // min_len entries, ordered by id.
  std::vector<Tracklet> tracklets() const;

  const std::vector<TrackRuntime>& active_tracks() const { return tracks_; }
  int missing_embedding_count() const { return missing_embeddings_; }

 private:
  void predict_all(const AffineTransform* camera);
  void update_track(TrackRuntime& track, const Detection& det, const Embedding* embedding);
  void start_track(const Detection& det, const Embedding* embedding);
  void retire(TrackRuntime& track);

  OnlineConfig config_;
  std::vector<TrackRuntime> tracks_;
  std::vector<Tracklet> finished_;
  int next_id_ = 1;
  int last_frame_ = 0;
  int missing_embeddings_ = 0;
};

// Runs the online stage over a whole sequence. Detections must be sorted by
// (frame, det_idx) without duplicates (InputError otherwise); classes outside
// the configured class map are ignored.
std::vector<Tracklet> track_sequence(std::span<const Detection> detections,
                                     const EmbeddingProvider* embeddings,
                                     const TransformTable& transforms, const OnlineConfig& config);

enum class VoteMode { kNone, kHard, kSoft };

struct VoteConfig {
  VoteMode mode = VoteMode::kSoft;
  double floor = 0.2;
};

// Confidence-weighted class votes of one entry list: weight of class c is the
// summed score of entries with class c, normalized. Hard keeps the argmax
// (ties to the lower class id) with weight 1; soft keeps classes with weight
// >= floor (at least the argmax) and renormalizes. Votes are ordered by
// weight descending, then class id. Throws PreconditionError when empty.
std::vector<ClassVote> vote_classes(std::span<const TrackEntry> entries, const VoteConfig& config);

// Assigns class_votes to each trajectory (cleared for VoteMode::kNone).
std::vector<Trajectory> rough2fine(std::span<const Trajectory> trajectories,
                                   const VoteConfig& config);

// Re-keys detection embeddings by (frame, tracklet id) so that they survive a
// round trip through tracklet files.
EmbeddingStore tracklet_embeddings(std::span<const Tracklet> tracklets,
                                   const EmbeddingProvider& detection_embeddings);

}  // namespace mot
