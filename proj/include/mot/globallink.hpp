#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mot/appearance.hpp"
#include "mot/model.hpp"
#include "mot/online.hpp"

namespace mot {

struct ClipFeatureBank {
  std::vector<Embedding> clips;
  int clip_len = 4;
};

struct LinkConfig {
  double th_appearance = 0.4;
  double th_time = 200.0;   // frames
  double th_space = 150.0;  // pixels
  double lambda_appearance = 40.0;
  double lambda_time = 1.0;
  double lambda_space = 1.0;
  int clip_len = 4;
  VoteConfig vote;

  // With lambda_appearance == 0 and an infinite appearance threshold the
  // appearance term is not evaluated at all.
  bool appearance_disabled() const;
  void validate() const;
};

// Clip-level features of a tracklet: consecutive windows of clip_len entries;
// each clip is the normalized mean of the available entry embeddings, looked
// up by (frame, trajectory id). Windows without any embedding are skipped;
// InputError when no entry has an embedding.
ClipFeatureBank clip_features(const Trajectory& tracklet, const EmbeddingProvider& embeddings,
                              int clip_len);

// Source of clip feature banks for the link stage.
class ClipFeatureProvider {
 public:
  virtual ~ClipFeatureProvider() = default;
  virtual ClipFeatureBank bank_for(const Trajectory& tracklet, int clip_len) const = 0;
};

// Default provider: clip_features over a per-entry embedding source.
class MeanClipProvider final : public ClipFeatureProvider {
 public:
  explicit MeanClipProvider(const EmbeddingProvider& embeddings) : embeddings_(embeddings) {}
  ClipFeatureBank bank_for(const Trajectory& tracklet, int clip_len) const override {
    return clip_features(tracklet, embeddings_, clip_len);
  }

 private:
  const EmbeddingProvider& embeddings_;
};

// Smallest cosine distance over all clip pairs. PreconditionError on an
// empty bank.
double appearance_cost(const ClipFeatureBank& a, const ClipFeatureBank& b);

struct LinkTerms {
  double appearance = 0.0;  // C_a
  double time = 0.0;        // C_t, frames
  double space = 0.0;       // C_s, pixels
};

// Weighted cost when every term is strictly below its threshold, nullopt
// (infeasible) otherwise.
std::optional<double> link_cost(const LinkTerms& terms, const LinkConfig& config);

// Spatio-temporal terms of linking `tail` -> `head`: the frame gap between
// tail's last and head's first entry and the distance between those box
// centers. nullopt unless tail ends strictly before head starts and both share
// a rough class. The appearance term is left at 0.
std::optional<LinkTerms> spatiotemporal_terms(const Trajectory& tail, const Trajectory& head);

// Links tracklets into trajectories with repeated rounds of Hungarian
// matching (tails as rows, heads as columns, per rough class) until no
// feasible pair remains. A merged trajectory takes the id of its earliest
// component; class votes are recomputed over the merged entries. Tracklets
// without embeddings stay unlinked unless appearance is disabled.
std::vector<Trajectory> global_link(std::span<const Tracklet> tracklets,
                                    const ClipFeatureProvider* clips, const LinkConfig& config);

}  // namespace mot
