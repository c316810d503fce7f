#include "mot/globallink.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "mot/assignment.hpp"
#include "mot/errors.hpp"
#include "mot/log.hpp"

namespace mot {

bool LinkConfig::appearance_disabled() const {
  return lambda_appearance == 0.0 && std::isinf(th_appearance) && th_appearance > 0.0;
}

void LinkConfig::validate() const {
  if (!(th_appearance > 0.0) || !(th_time > 0.0) || !(th_space > 0.0)) {
    throw InputError("link config: thresholds must be positive");
  }
  if (!(lambda_appearance >= 0.0) || !(lambda_time >= 0.0) || !(lambda_space >= 0.0)) {
    throw InputError("link config: weights must be non-negative");
  }
  if (clip_len < 1) throw InputError("link config: clip_len must be at least 1");
}

ClipFeatureBank clip_features(const Trajectory& tracklet, const EmbeddingProvider& embeddings,
                              int clip_len) {
  if (tracklet.entries.empty()) throw PreconditionError("clip_features: empty tracklet");
  if (clip_len < 1) throw InputError("clip_features: clip length must be at least 1");
  ClipFeatureBank bank;
  bank.clip_len = clip_len;
  const std::size_t n = tracklet.entries.size();
  for (std::size_t start = 0; start < n; start += clip_len) {
    const std::size_t stop = std::min(n, start + static_cast<std::size_t>(clip_len));
    Eigen::VectorXd sum;
    int count = 0;
    for (std::size_t k = start; k < stop; ++k) {
      const Embedding* e = embeddings.find(tracklet.entries[k].frame, tracklet.id);
      if (e == nullptr) continue;
      if (count == 0) {
        sum = e->values();
      } else {
        sum += e->values();
      }
      ++count;
    }
    if (count == 0) continue;
    bank.clips.push_back(count == 1 ? Embedding::from_values(sum)
                                    : Embedding::normalized(sum / static_cast<double>(count)));
  }
  if (bank.clips.empty()) {
    throw InputError("tracklet " + std::to_string(tracklet.id) + " has no embeddings");
  }
  return bank;
}

double appearance_cost(const ClipFeatureBank& a, const ClipFeatureBank& b) {
  if (a.clips.empty() || b.clips.empty()) throw PreconditionError("appearance_cost: empty bank");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& fa : a.clips) {
    for (const auto& fb : b.clips) best = std::min(best, cosine_distance(fa, fb));
  }
  return best;
}

std::optional<double> link_cost(const LinkTerms& terms, const LinkConfig& config) {
  if (!(terms.appearance < config.th_appearance && terms.time < config.th_time &&
        terms.space < config.th_space)) {
    return std::nullopt;
  }
  return config.lambda_appearance * terms.appearance + config.lambda_time * terms.time +
         config.lambda_space * terms.space;
}

std::optional<LinkTerms> spatiotemporal_terms(const Trajectory& tail, const Trajectory& head) {
  if (tail.entries.empty() || head.entries.empty()) return std::nullopt;
  if (tail.rough_class != head.rough_class) return std::nullopt;
  const TrackEntry& last = tail.entries.back();
  const TrackEntry& first = head.entries.front();
  if (last.frame >= first.frame) return std::nullopt;
  LinkTerms terms;
  terms.time = static_cast<double>(first.frame - last.frame);
  terms.space = std::hypot(first.box.center_x() - last.box.center_x(),
                           first.box.center_y() - last.box.center_y());
  return terms;
}

namespace {

struct LinkNode {
  Trajectory trajectory;
  std::optional<ClipFeatureBank> bank;
};

LinkNode merge_chain(const std::vector<const LinkNode*>& chain) {
  LinkNode merged;
  merged.trajectory.id = chain.front()->trajectory.id;
  merged.trajectory.rough_class = chain.front()->trajectory.rough_class;
  for (const LinkNode* part : chain) {
    const auto& entries = part->trajectory.entries;
    merged.trajectory.entries.insert(merged.trajectory.entries.end(), entries.begin(), entries.end());
    if (!part->bank) continue;
    if (!merged.bank) merged.bank = ClipFeatureBank{{}, part->bank->clip_len};
    merged.bank->clips.insert(merged.bank->clips.end(), part->bank->clips.begin(),
                              part->bank->clips.end());
  }
  return merged;
}

// One matching round over trajectories of a single rough class. Returns true
// when at least one pair was linked.
bool link_round(std::vector<LinkNode>& group, bool use_appearance, const LinkConfig& config) {
  const int n = static_cast<int>(group.size());
  if (n < 2) return false;

  Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(n, n, kInfeasible);
  bool any = false;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      std::optional<LinkTerms> terms =
          spatiotemporal_terms(group[i].trajectory, group[j].trajectory);
      if (!terms) continue;
      if (use_appearance) {
        if (!group[i].bank || !group[j].bank) continue;
        terms->appearance = appearance_cost(*group[i].bank, *group[j].bank);
      }
      if (auto c = link_cost(*terms, config)) {
        cost(i, j) = *c;
        any = true;
      }
    }
  }
  if (!any) return false;

  const AssignmentResult assigned = solve_assignment(cost);
  if (assigned.matches.empty()) return false;
  std::vector<int> next(n, -1), prev(n, -1);
  for (auto [i, j] : assigned.matches) {
    next[i] = j;
    prev[j] = i;
  }
  std::vector<LinkNode> merged;
  for (int i = 0; i < n; ++i) {
    if (prev[i] != -1) continue;
    std::vector<const LinkNode*> chain;
    for (int k = i; k != -1; k = next[k]) chain.push_back(&group[k]);
    merged.push_back(merge_chain(chain));
  }
  std::sort(merged.begin(), merged.end(), [](const LinkNode& a, const LinkNode& b) {
    return a.trajectory.id < b.trajectory.id;
  });
  group = std::move(merged);
  return true;
}

}  // namespace

std::vector<Trajectory> global_link(std::span<const Tracklet> tracklets,
                                    const ClipFeatureProvider* clips, const LinkConfig& config) {
  config.validate();
  std::map<int, std::vector<Trajectory>> by_class;
  for (const auto& tl : tracklets) {
    check_entries(tl.entries);
    by_class[tl.rough_class].push_back(to_trajectory(tl));
  }
  const bool use_appearance = !config.appearance_disabled();
  std::vector<Trajectory> out;
  for (auto& [rough, trajectories] : by_class) {
    std::sort(trajectories.begin(), trajectories.end(),
              [](const Trajectory& a, const Trajectory& b) { return a.id < b.id; });
    std::vector<LinkNode> group;
    for (auto& t : trajectories) {
      LinkNode node{std::move(t), std::nullopt};
      if (use_appearance && clips != nullptr) {
        try {
          node.bank = clips->bank_for(node.trajectory, config.clip_len);
        } catch (const InputError&) {
          log::debug("tracklet " + std::to_string(node.trajectory.id) +
                     " has no embeddings; it is not linked");
        }
      }
      group.push_back(std::move(node));
    }
    while (link_round(group, use_appearance, config)) {
    }
    for (auto& node : group) out.push_back(std::move(node.trajectory));
  }
  std::sort(out.begin(), out.end(), [](const Trajectory& a, const Trajectory& b) { return a.id < b.id; });
  if (config.vote.mode != VoteMode::kNone) {
    for (auto& t : out) t.class_votes = vote_classes(t.entries, config.vote);
  }
  return out;
}

}  // namespace mot
