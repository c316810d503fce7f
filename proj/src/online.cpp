#include "mot/online.hpp"

#include <algorithm>
#include <string>

#include "mot/assignment.hpp"
#include "mot/errors.hpp"
#include "mot/log.hpp"

namespace mot {

const FilterSetup& OnlineConfig::filter_for(int rough_class) const {
  static const FilterSetup kDefault{};
  auto it = filters.find(rough_class);
  return it == filters.end() ? kDefault : it->second;
}

void OnlineConfig::validate() const {
  if (n_init < 1 || max_age < 0 || min_len < 1) {
    throw InputError("online config: n_init >= 1, max_age >= 0 and min_len >= 1 are required");
  }
  if (!(gate_threshold > 0.0) || !(appearance_threshold > 0.0) || !(iou_fallback_threshold > 0.0)) {
    throw InputError("online config: thresholds must be positive");
  }
  if (bank_capacity == 0 || !(ema_momentum >= 0.0 && ema_momentum <= 1.0)) {
    throw InputError("online config: bank capacity >= 1 and momentum in [0, 1] are required");
  }
  if (classes.mapping().empty()) throw InputError("online config: empty class map");
  noise.validate();
}

namespace {

void match_pass(std::span<const int> rows, std::span<const int> cols, const Eigen::MatrixXd& cost,
                std::vector<char>& track_used, std::vector<char>& det_used,
                FrameAssociation& out) {
  const AssignmentResult assigned = solve_assignment(cost);
  for (auto [r, c] : assigned.matches) {
    out.matches.emplace_back(rows[r], cols[c]);
    track_used[rows[r]] = 1;
    det_used[cols[c]] = 1;
  }
}

std::vector<int> unused(const std::vector<char>& used) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(used.size()); ++i) {
    if (!used[i]) out.push_back(i);
  }
  return out;
}

}  // namespace

FrameAssociation associate_frame(std::span<const TrackRuntime> tracks,
                                 std::span<const Detection> detections,
                                 std::span<const Embedding* const> embeddings,
                                 const OnlineConfig& config) {
  if (embeddings.size() != detections.size()) {
    throw InputError("associate_frame: embeddings are not parallel to detections");
  }
  const int n_tracks = static_cast<int>(tracks.size());
  const int n_dets = static_cast<int>(detections.size());
  std::vector<char> track_used(n_tracks, 0), det_used(n_dets, 0);
  std::vector<int> det_rough(n_dets);
  std::vector<Vector4> det_z(n_dets);
  for (int d = 0; d < n_dets; ++d) {
    det_rough[d] = config.classes.rough_of(detections[d].class_id);
    det_z[d] = measurement_of(detections[d].box);
  }

  FrameAssociation out;

  // Matching cascade over confirmed tracks, most recently updated first.
  for (int level = 0; level <= config.max_age; ++level) {
    std::vector<int> rows;
    for (int t = 0; t < n_tracks; ++t) {
      if (!track_used[t] && tracks[t].status == TrackStatus::kConfirmed &&
          tracks[t].misses == level) {
        rows.push_back(t);
      }
    }
    if (rows.empty()) continue;
    const std::vector<int> cols = unused(det_used);
    if (cols.empty()) break;

    Eigen::MatrixXd cost(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const TrackRuntime& track = tracks[rows[r]];
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const int d = cols[c];
        cost(r, c) = kInfeasible;
        if (det_rough[d] != track.rough_class) continue;
        const double gate = gating_distance(track.state, det_z[d], config.noise);
        if (gate > config.gate_threshold) continue;
        const Embedding* emb = embeddings[d];
        if (emb != nullptr && !track.bank.empty()) {
          if (emb->dim() != track.bank.dim()) {
            throw InputError("embedding dimension " + std::to_string(emb->dim()) +
                             " does not match track bank dimension " +
                             std::to_string(track.bank.dim()));
          }
          const double appearance = track.bank.min_cosine_distance(*emb);
          if (appearance <= config.appearance_threshold) cost(r, c) = appearance;
        } else {
          cost(r, c) = config.appearance_threshold * (gate / config.gate_threshold);
        }
      }
    }
    match_pass(rows, cols, cost, track_used, det_used, out);
  }

  // IoU fallback for tentative tracks and tracks seen on the previous frame.
  std::vector<int> rows;
  for (int t = 0; t < n_tracks; ++t) {
    if (track_used[t]) continue;
    if (tracks[t].status == TrackStatus::kTentative ||
        (tracks[t].status == TrackStatus::kConfirmed && tracks[t].misses == 0)) {
      rows.push_back(t);
    }
  }
  const std::vector<int> cols = unused(det_used);
  if (!rows.empty() && !cols.empty()) {
    Eigen::MatrixXd cost(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const TrackRuntime& track = tracks[rows[r]];
      const Box predicted = track.state.to_box();
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const int d = cols[c];
        cost(r, c) = kInfeasible;
        if (det_rough[d] != track.rough_class || !predicted.valid()) continue;
        const double distance = 1.0 - box_iou(predicted, detections[d].box);
        if (distance <= config.iou_fallback_threshold) cost(r, c) = distance;
      }
    }
    match_pass(rows, cols, cost, track_used, det_used, out);
  }

  std::sort(out.matches.begin(), out.matches.end());
  out.unmatched_tracks = unused(track_used);
  out.unmatched_detections = unused(det_used);
  return out;
}

OnlineTracker::OnlineTracker(OnlineConfig config) : config_(std::move(config)) {
  config_.validate();
}

void OnlineTracker::predict_all(const AffineTransform* camera) {
  const bool warp = camera != nullptr && !camera->is_identity();
  for (auto& track : tracks_) {
    const FilterSetup& setup = config_.filter_for(track.rough_class);
    try {
      track.state = setup.kind == FilterKind::kUnscented
                        ? ukf_predict(track.state, setup.model, config_.noise, config_.ukf)
                        : predict(track.state, setup.model, config_.noise, config_.ukf);
      // A coasting track whose extent has shrunk to nothing cannot be
      // matched again.
      if (!(track.state.mean(2) > 0.0 && track.state.mean(3) > 0.0)) {
        log::debug("track " + std::to_string(track.id) + " collapsed at frame " +
                   std::to_string(last_frame_ + 1));
        retire(track);
        continue;
      }
      if (warp) track.state = compensate(track.state, *camera);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " (frame " + std::to_string(last_frame_ + 1) +
                           ", track " + std::to_string(track.id) + ")");
    }
  }
  std::erase_if(tracks_, [](const TrackRuntime& t) { return t.status == TrackStatus::kDeleted; });
}

void OnlineTracker::update_track(TrackRuntime& track, const Detection& det,
                                 const Embedding* embedding) {
  const FilterSetup& setup = config_.filter_for(track.rough_class);
  const Vector4 z = measurement_of(det.box);
  try {
    track.state = setup.kind == FilterKind::kUnscented
                      ? ukf_update(track.state, z, det.score, setup.noise_mode, config_.noise,
                                   config_.ukf)
                      : update(track.state, z, det.score, setup.noise_mode, config_.noise);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(e.what()) + " (frame " + std::to_string(det.frame) +
                         ", track " + std::to_string(track.id) + ")");
  }
  if (embedding != nullptr) track.bank.push(*embedding);
  track.entries.push_back({det.frame, det.box, det.score, det.class_id, det.det_idx, false});
  ++track.hits;
  track.misses = 0;
  if (track.status == TrackStatus::kTentative && track.hits >= config_.n_init) {
    track.status = TrackStatus::kConfirmed;
    track.ever_confirmed = true;
  }
}

void OnlineTracker::start_track(const Detection& det, const Embedding* embedding) {
  TrackRuntime track;
  track.id = next_id_++;
  track.state = initiate(det.box, config_.noise);
  track.bank = EmaBank(config_.bank_capacity, config_.ema_momentum);
  if (embedding != nullptr) track.bank.push(*embedding);
  track.rough_class = config_.classes.rough_of(det.class_id);
  track.hits = 1;
  track.entries.push_back({det.frame, det.box, det.score, det.class_id, det.det_idx, false});
  if (track.hits >= config_.n_init) {
    track.status = TrackStatus::kConfirmed;
    track.ever_confirmed = true;
  }
  tracks_.push_back(std::move(track));
}

void OnlineTracker::retire(TrackRuntime& track) {
  track.status = TrackStatus::kDeleted;
  if (track.ever_confirmed && static_cast<int>(track.entries.size()) >= config_.min_len) {
    finished_.push_back({track.id, std::move(track.entries), track.rough_class});
  }
}

void OnlineTracker::step(int frame, std::span<const Detection> detections,
                         const EmbeddingProvider* embeddings, const AffineTransform* camera) {
  if (frame <= last_frame_) {
    throw InputError("frame " + std::to_string(frame) + " does not advance past frame " +
                     std::to_string(last_frame_));
  }
  predict_all(camera);
  last_frame_ = frame;

  std::vector<const Embedding*> det_embeddings(detections.size(), nullptr);
  for (std::size_t d = 0; d < detections.size(); ++d) {
    if (detections[d].frame != frame) {
      throw InputError("detection of frame " + std::to_string(detections[d].frame) +
                       " passed to frame " + std::to_string(frame));
    }
    if (embeddings != nullptr) {
      det_embeddings[d] = embeddings->find(frame, detections[d].det_idx);
      if (det_embeddings[d] == nullptr) ++missing_embeddings_;
    }
  }

  const FrameAssociation assoc = associate_frame(tracks_, detections, det_embeddings, config_);
  for (auto [t, d] : assoc.matches) update_track(tracks_[t], detections[d], det_embeddings[d]);
  for (int t : assoc.unmatched_tracks) {
    TrackRuntime& track = tracks_[t];
    ++track.misses;
    if (track.status == TrackStatus::kTentative || track.misses > config_.max_age) retire(track);
  }
  std::erase_if(tracks_, [](const TrackRuntime& t) { return t.status == TrackStatus::kDeleted; });
  for (int d : assoc.unmatched_detections) start_track(detections[d], det_embeddings[d]);
}

std::vector<Tracklet> OnlineTracker::tracklets() const {
  std::vector<Tracklet> out = finished_;
  for (const auto& track : tracks_) {
    if (track.ever_confirmed && static_cast<int>(track.entries.size()) >= config_.min_len) {
      out.push_back({track.id, track.entries, track.rough_class});
    }
  }
  std::sort(out.begin(), out.end(), [](const Tracklet& a, const Tracklet& b) { return a.id < b.id; });
  return out;
}

std::vector<Tracklet> track_sequence(std::span<const Detection> detections,
                                     const EmbeddingProvider* embeddings,
                                     const TransformTable& transforms, const OnlineConfig& config) {
  for (std::size_t k = 1; k < detections.size(); ++k) {
    const auto& a = detections[k - 1];
    const auto& b = detections[k];
    if (b.frame < a.frame || (b.frame == a.frame && b.det_idx <= a.det_idx)) {
      throw InputError("detections not sorted by (frame, det_idx) or duplicated at frame " +
                       std::to_string(b.frame) + ", det_idx " + std::to_string(b.det_idx));
    }
  }
  std::vector<Detection> kept;
  kept.reserve(detections.size());
  for (const auto& d : detections) {
    if (config.classes.contains(d.class_id)) kept.push_back(d);
  }
  if (kept.empty()) return {};
  if (embeddings == nullptr) log::warn("no appearance embeddings; association uses motion only");

  OnlineTracker tracker(config);
  const int first = kept.front().frame;
  const int last = kept.back().frame;
  std::size_t cursor = 0;
  for (int frame = first; frame <= last; ++frame) {
    std::size_t end = cursor;
    while (end < kept.size() && kept[end].frame == frame) ++end;
    const AffineTransform* camera = transforms.contains(frame) ? &transforms.at(frame) : nullptr;
    tracker.step(frame, std::span<const Detection>(kept).subspan(cursor, end - cursor), embeddings,
                 camera);
    cursor = end;
  }
  if (tracker.missing_embedding_count() > 0) {
    log::warn(std::to_string(tracker.missing_embedding_count()) +
              " detections have no embedding; those pairs use motion-only cost");
  }
  return tracker.tracklets();
}

std::vector<ClassVote> vote_classes(std::span<const TrackEntry> entries, const VoteConfig& config) {
  if (entries.empty()) throw PreconditionError("vote_classes: empty trajectory");
  std::map<int, double> mass;
  double total = 0.0;
  for (const auto& e : entries) {
    mass[e.class_id] += e.score;
    total += e.score;
  }
  if (!(total > 0.0)) {
    // All scores zero: fall back to counting entries.
    mass.clear();
    for (const auto& e : entries) mass[e.class_id] += 1.0;
    total = static_cast<double>(entries.size());
  }
  std::vector<ClassVote> votes;
  for (auto [c, m] : mass) votes.push_back({c, m / total});
  std::stable_sort(votes.begin(), votes.end(),
                   [](const ClassVote& a, const ClassVote& b) { return a.weight > b.weight; });

  if (config.mode == VoteMode::kHard) return {{votes.front().class_id, 1.0}};

  std::vector<ClassVote> kept;
  for (const auto& v : votes) {
    if (v.weight >= config.floor) kept.push_back(v);
  }
  if (kept.empty()) kept.push_back(votes.front());
  double sum = 0.0;
  for (const auto& v : kept) sum += v.weight;
  if (sum != 1.0) {
    for (auto& v : kept) v.weight /= sum;
  }
  return kept;
}

std::vector<Trajectory> rough2fine(std::span<const Trajectory> trajectories,
                                   const VoteConfig& config) {
  std::vector<Trajectory> out(trajectories.begin(), trajectories.end());
  for (auto& t : out) {
    if (config.mode == VoteMode::kNone) {
      t.class_votes.clear();
    } else {
      t.class_votes = vote_classes(t.entries, config);
    }
  }
  return out;
}

EmbeddingStore tracklet_embeddings(std::span<const Tracklet> tracklets,
                                   const EmbeddingProvider& detection_embeddings) {
  EmbeddingStore store(detection_embeddings.dim());
  for (const auto& tl : tracklets) {
    for (const auto& e : tl.entries) {
      if (e.det_idx < 0) continue;
      if (const Embedding* emb = detection_embeddings.find(e.frame, e.det_idx)) {
        store.insert(e.frame, tl.id, *emb);
      }
    }
  }
  return store;
}

}  // namespace mot
