#include <gtest/gtest.h>

#include <cmath>

#include "mot/errors.hpp"
#include "mot/globallink.hpp"
#include "mot/simulation.hpp"

namespace mot {
namespace {

Embedding vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x(i++) = d;
  return Embedding::normalized(x);
}

Tracklet line_tracklet(int id, int first, int last, double x0, double vx, int cls = 1) {
  Tracklet t{id, {}, cls == 1 ? kRoughPerson : kRoughVehicle};
  for (int f = first; f <= last; ++f) {
    t.entries.push_back({f, {x0 + vx * (f - first), 100, 20, 40}, 0.9, cls, -1, false});
  }
  return t;
}

void add_embeddings(EmbeddingStore& store, const Tracklet& t, const Embedding& e) {
  for (const auto& entry : t.entries) store.insert(entry.frame, t.id, e);
}

TEST(ClipFeatures, ClipLengthOneGivesDetectionEmbeddings) {
  EmbeddingStore store(2);
  const Tracklet t = line_tracklet(3, 1, 3, 0, 1);
  store.insert(1, 3, vec({1, 0}));
  store.insert(2, 3, vec({0, 1}));
  store.insert(3, 3, vec({1, 1}));
  const auto bank = clip_features(to_trajectory(t), store, 1);
  ASSERT_EQ(bank.clips.size(), 3u);
  EXPECT_EQ(bank.clips[1], vec({0, 1}));
}

TEST(ClipFeatures, MeanIsNormalized) {
  EmbeddingStore store(2);
  const Tracklet t = line_tracklet(1, 1, 2, 0, 1);
  store.insert(1, 1, vec({1, 0}));
  store.insert(2, 1, vec({0, 1}));
  const auto bank = clip_features(to_trajectory(t), store, 2);
  ASSERT_EQ(bank.clips.size(), 1u);
  EXPECT_NEAR(bank.clips[0].values()(0), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(bank.clips[0].values()(1), std::sqrt(0.5), 1e-15);
}

TEST(ClipFeatures, CeilingPartition) {
  EmbeddingStore store(2);
  const Tracklet t = line_tracklet(1, 1, 5, 0, 1);
  add_embeddings(store, t, vec({1, 0}));
  EXPECT_EQ(clip_features(to_trajectory(t), store, 4).clips.size(), 2u);
}

TEST(ClipFeatures, WindowsWithoutEmbeddingsAreSkipped) {
  EmbeddingStore store(2);
  const Tracklet t = line_tracklet(1, 1, 8, 0, 1);
  store.insert(2, 1, vec({1, 0}));
  EXPECT_EQ(clip_features(to_trajectory(t), store, 4).clips.size(), 1u);
  EmbeddingStore empty(2);
  EXPECT_THROW(clip_features(to_trajectory(t), empty, 4), InputError);
}

TEST(AppearanceCost, Examples) {
  const ClipFeatureBank a{{vec({1, 0})}, 4};
  const ClipFeatureBank b{{vec({1, 1}), vec({0, 1})}, 4};
  EXPECT_NEAR(appearance_cost(a, b), 1.0 - std::sqrt(0.5), 1e-15);
  EXPECT_EQ(appearance_cost(a, b), appearance_cost(b, a));
  EXPECT_DOUBLE_EQ(appearance_cost(a, a), 0.0);
  EXPECT_DOUBLE_EQ(appearance_cost(a, ClipFeatureBank{{vec({0, 1})}, 4}), 1.0);
  EXPECT_THROW(appearance_cost(a, ClipFeatureBank{}), PreconditionError);
}

TEST(LinkCost, WeightedSum) {
  const auto c = link_cost({0.2, 10, 50}, LinkConfig{});
  ASSERT_TRUE(c.has_value());
  EXPECT_NEAR(*c, 68.0, 1e-12);
}

TEST(LinkCost, ThresholdViolations) {
  const LinkConfig config;
  EXPECT_FALSE(link_cost({0.5, 10, 50}, config));
  EXPECT_FALSE(link_cost({0.4, 10, 50}, config));
  EXPECT_FALSE(link_cost({0.2, 200, 50}, config));
  EXPECT_FALSE(link_cost({0.2, 10, 150}, config));
}

TEST(SpatiotemporalTerms, OrderAndClass) {
  const auto a = to_trajectory(line_tracklet(1, 1, 10, 0, 1));
  const auto b = to_trajectory(line_tracklet(2, 15, 20, 39, 1));
  const auto terms = spatiotemporal_terms(a, b);
  ASSERT_TRUE(terms);
  EXPECT_DOUBLE_EQ(terms->time, 5.0);
  EXPECT_DOUBLE_EQ(terms->space, 30.0);
  EXPECT_FALSE(spatiotemporal_terms(b, a));
  EXPECT_FALSE(spatiotemporal_terms(a, a));
  const auto car = to_trajectory(line_tracklet(3, 15, 20, 39, 1, 4));
  EXPECT_FALSE(spatiotemporal_terms(a, car));
}

TEST(GlobalLink, SingleTrackletUnchanged) {
  const auto t = line_tracklet(5, 1, 10, 0, 1);
  EmbeddingStore store(2);
  add_embeddings(store, t, vec({1, 0}));
  MeanClipProvider clips(store);
  LinkConfig config;
  config.vote.mode = VoteMode::kNone;
  const auto out = global_link(std::vector<Tracklet>{t}, &clips, config);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].id, 5);
  EXPECT_EQ(out[0].entries.size(), t.entries.size());
  EXPECT_TRUE(out[0].class_votes.empty());
}

TEST(GlobalLink, ChainsThreeTracklets) {
  const std::vector<Tracklet> parts{line_tracklet(7, 1, 20, 0, 1), line_tracklet(3, 41, 60, 40, 1),
                                    line_tracklet(9, 81, 100, 80, 1)};
  EmbeddingStore store(2);
  for (const auto& t : parts) add_embeddings(store, t, vec({1, 0.1}));
  MeanClipProvider clips(store);
  const auto out = global_link(parts, &clips, LinkConfig{});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].id, 7);
  EXPECT_EQ(out[0].entries.size(), 60u);
  EXPECT_EQ(out[0].class_votes, (std::vector<ClassVote>{{1, 1.0}}));
  check_entries(out[0].entries);
}

TEST(GlobalLink, OrthogonalAppearanceNeverMerges) {
  const std::vector<Tracklet> parts{line_tracklet(1, 1, 20, 0, 1), line_tracklet(2, 25, 40, 25, 1)};
  EmbeddingStore store(2);
  add_embeddings(store, parts[0], vec({1, 0}));
  add_embeddings(store, parts[1], vec({0, 1}));
  MeanClipProvider clips(store);
  EXPECT_EQ(global_link(parts, &clips, LinkConfig{}).size(), 2u);
}

TEST(GlobalLink, AppearanceAblationUsesSpaceTimeOnly) {
  const std::vector<Tracklet> parts{line_tracklet(1, 1, 20, 0, 1), line_tracklet(2, 25, 40, 25, 1)};
  LinkConfig config;
  config.lambda_appearance = 0.0;
  config.th_appearance = std::numeric_limits<double>::infinity();
  EXPECT_EQ(global_link(parts, nullptr, config).size(), 1u);
  // Without embeddings and with appearance enabled nothing is linked.
  EXPECT_EQ(global_link(parts, nullptr, LinkConfig{}).size(), 2u);
}

TEST(GlobalLink, PrefersCheaperHead) {
  // Tail 1 can reach heads 2 (near) and 3 (far); 2 wins, 3 stays alone
  // because it overlaps 2 in time.
  const std::vector<Tracklet> parts{line_tracklet(1, 1, 20, 0, 1), line_tracklet(2, 25, 40, 25, 1),
                                    line_tracklet(3, 26, 40, 100, 1)};
  EmbeddingStore store(2);
  for (const auto& t : parts) add_embeddings(store, t, vec({1, 0}));
  MeanClipProvider clips(store);
  const auto out = global_link(parts, &clips, LinkConfig{});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].entries.size(), 36u);
  EXPECT_EQ(out[1].id, 3);
}

TEST(GlobalLink, MergedLengthIsSumAndSupportsDisjoint) {
  const auto data = simulate(make_scenario(ScenarioPreset::kOcclusion, 7));
  const auto tracklets = track_sequence(data.detections, &data.embeddings, data.transforms, {});
  const auto store = tracklet_embeddings(tracklets, data.embeddings);
  MeanClipProvider clips(store);
  const auto linked = global_link(tracklets, &clips, LinkConfig{});
  std::size_t in = 0, out = 0;
  for (const auto& t : tracklets) in += t.entries.size();
  for (const auto& t : linked) {
    out += t.entries.size();
    EXPECT_NO_THROW(check_entries(t.entries));
  }
  EXPECT_EQ(in, out);
  EXPECT_LT(linked.size(), tracklets.size());
}

}  // namespace
}  // namespace mot
