#include <gtest/gtest.h>

#include <random>
#include <set>

#include "mot/camera.hpp"
#include "mot/errors.hpp"
#include "mot/online.hpp"
#include "mot/simulation.hpp"

namespace mot {
namespace {

Embedding emb2(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return Embedding::normalized(v);
}

TrackRuntime confirmed_track(int id, const Box& box, const Embedding& feature) {
  TrackRuntime t;
  t.id = id;
  t.state = initiate(box, NoiseConfig{});
  t.status = TrackStatus::kConfirmed;
  t.ever_confirmed = true;
  t.hits = 3;
  t.rough_class = kRoughPerson;
  t.bank.push(feature);
  return t;
}

TEST(AssociateFrame, MatchesDetectionAtPrediction) {
  const Box box{100, 100, 20, 40};
  std::vector<TrackRuntime> tracks{confirmed_track(1, box, emb2(1, 0))};
  std::vector<Detection> dets{{1, 0, box, 0.9, 1}};
  const Embedding f = emb2(1, 0);
  std::vector<const Embedding*> embs{&f};
  const auto r = associate_frame(tracks, dets, embs, OnlineConfig{});
  ASSERT_EQ(r.matches.size(), 1u);
  EXPECT_EQ(r.matches[0], std::make_pair(0, 0));
}

TEST(AssociateFrame, GateDominatesAppearance) {
  std::vector<TrackRuntime> tracks{confirmed_track(1, {100, 100, 20, 40}, emb2(1, 0))};
  std::vector<Detection> dets{{1, 0, {600, 600, 20, 40}, 0.9, 1}};
  const Embedding f = emb2(1, 0);
  std::vector<const Embedding*> embs{&f};
  const auto r = associate_frame(tracks, dets, embs, OnlineConfig{});
  EXPECT_TRUE(r.matches.empty());
  EXPECT_EQ(r.unmatched_detections, std::vector<int>{0});
}

TEST(AssociateFrame, CrossedAppearanceCostsGiveDiagonal) {
  // Appearance costs [[0.1, 0.9], [0.9, 0.1]]; each detection sits on the
  // other track's box, so geometry alone would pick the anti-diagonal.
  auto e3 = [](double x, double y, double z) {
    Eigen::VectorXd v(3);
    v << x, y, z;
    return Embedding::normalized(v);
  };
  const Box a{100, 100, 20, 40}, b{103, 100, 20, 40};
  std::vector<TrackRuntime> tracks{confirmed_track(1, a, e3(1, 0, 0)),
                                   confirmed_track(2, b, e3(0, 1, 0))};
  const Embedding da = e3(0.9, 0.1, std::sqrt(0.18));
  const Embedding db = e3(0.1, 0.9, std::sqrt(0.18));
  ASSERT_NEAR(tracks[0].bank.min_cosine_distance(da), 0.1, 1e-12);
  ASSERT_NEAR(tracks[1].bank.min_cosine_distance(da), 0.9, 1e-12);
  std::vector<Detection> dets{{1, 0, b, 0.9, 1}, {1, 1, a, 0.9, 1}};
  std::vector<const Embedding*> embs{&da, &db};
  OnlineConfig config;
  config.appearance_threshold = 1.0;
  const auto r = associate_frame(tracks, dets, embs, config);
  const std::vector<std::pair<int, int>> expected{{0, 0}, {1, 1}};
  EXPECT_EQ(r.matches, expected);
}

TEST(AssociateFrame, RoughClassesNeverMix) {
  const Box box{100, 100, 20, 40};
  std::vector<TrackRuntime> tracks{confirmed_track(1, box, emb2(1, 0))};
  std::vector<Detection> dets{{1, 0, box, 0.9, 4}};
  const Embedding f = emb2(1, 0);
  std::vector<const Embedding*> embs{&f};
  EXPECT_TRUE(associate_frame(tracks, dets, embs, OnlineConfig{}).matches.empty());
}

TEST(AssociateFrame, DimensionMismatchThrows) {
  const Box box{100, 100, 20, 40};
  std::vector<TrackRuntime> tracks{confirmed_track(1, box, emb2(1, 0))};
  std::vector<Detection> dets{{1, 0, box, 0.9, 1}};
  Eigen::VectorXd v = Eigen::VectorXd::Ones(3);
  const Embedding f = Embedding::normalized(v);
  std::vector<const Embedding*> embs{&f};
  EXPECT_THROW(associate_frame(tracks, dets, embs, OnlineConfig{}), InputError);
}

std::vector<Detection> straight_line(int frames, int skip_from = 0, int skip_to = -1) {
  std::vector<Detection> dets;
  for (int f = 1; f <= frames; ++f) {
    if (f >= skip_from && f <= skip_to) continue;
    dets.push_back({f, 0, {100.0 + 2.0 * f, 50.0, 20, 40}, 1.0, 1});
  }
  return dets;
}

TEST(TrackSequence, SingleObjectSingleTracklet) {
  const auto dets = straight_line(50);
  const auto tracklets = track_sequence(dets, nullptr, {}, OnlineConfig{});
  ASSERT_EQ(tracklets.size(), 1u);
  EXPECT_EQ(tracklets[0].entries.size(), 50u);
  EXPECT_EQ(tracklets[0].entries.front().frame, 1);
  EXPECT_EQ(tracklets[0].entries.back().frame, 50);
}

TEST(TrackSequence, LongGapBreaksIdentity) {
  const auto dets = straight_line(100, 30, 65);  // 36 missing frames > max_age
  const auto tracklets = track_sequence(dets, nullptr, {}, OnlineConfig{});
  ASSERT_EQ(tracklets.size(), 2u);
  EXPECT_EQ(tracklets[0].entries.back().frame, 29);
  EXPECT_EQ(tracklets[1].entries.front().frame, 66);
}

TEST(TrackSequence, ShortGapKeepsIdentity) {
  const auto dets = straight_line(100, 30, 45);
  const auto tracklets = track_sequence(dets, nullptr, {}, OnlineConfig{});
  ASSERT_EQ(tracklets.size(), 1u);
  EXPECT_EQ(tracklets[0].entries.size(), 84u);
}

TEST(TrackSequence, RejectsUnsortedOrDuplicateKeys) {
  std::vector<Detection> dets{{2, 0, {0, 0, 5, 5}, 1, 1}, {1, 0, {0, 0, 5, 5}, 1, 1}};
  EXPECT_THROW(track_sequence(dets, nullptr, {}, OnlineConfig{}), InputError);
  dets = {{1, 0, {0, 0, 5, 5}, 1, 1}, {1, 0, {9, 9, 5, 5}, 1, 1}};
  EXPECT_THROW(track_sequence(dets, nullptr, {}, OnlineConfig{}), InputError);
}

TEST(TrackSequence, CollapsingTrackIsRetiredNotThrown) {
  // Height shrinks by 6 px per frame, so a coasting prediction soon reaches
  // zero; the track must be retired and its observed part kept.
  std::vector<Detection> dets;
  for (int f = 1; f <= 10; ++f) {
    const double h = 70.0 - 6.0 * f;
    dets.push_back({f, 0, {100.0, 100.0, 0.5 * h, h}, 1.0, 1});
  }
  dets.push_back({30, 0, {400.0, 100.0, 20, 40}, 1.0, 1});
  TransformTable camera;
  for (int f = 2; f <= 30; ++f) camera.set(f, AffineTransform::translation(1.0, 0.0));
  std::vector<Tracklet> tracklets;
  ASSERT_NO_THROW(tracklets = track_sequence(dets, nullptr, camera, OnlineConfig{}));
  ASSERT_GE(tracklets.size(), 1u);
  EXPECT_EQ(tracklets[0].entries.size(), 10u);
}

TEST(TrackSequence, EmptyInput) {
  EXPECT_TRUE(track_sequence({}, nullptr, {}, OnlineConfig{}).empty());
}

TEST(TrackSequence, SimulatedScenarioInvariants) {
  const auto data = simulate(make_scenario(ScenarioPreset::kStandard, 7));
  const OnlineConfig config;
  const auto a = track_sequence(data.detections, &data.embeddings, data.transforms, config);
  const auto b = track_sequence(data.detections, &data.embeddings, data.transforms, config);
  ASSERT_EQ(a.size(), b.size());

  std::map<std::pair<int, int>, int> identity;
  for (std::size_t k = 0; k < data.detections.size(); ++k) {
    identity[{data.detections[k].frame, data.detections[k].det_idx}] = data.detection_identity[k];
  }
  std::set<std::pair<int, int>> used;
  std::size_t pure_entries = 0, all_entries = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].id, b[i].id);
    ASSERT_EQ(a[i].entries.size(), b[i].entries.size());
    std::map<int, int> counts;
    std::set<int> rough;
    for (std::size_t k = 0; k < a[i].entries.size(); ++k) {
      const auto& e = a[i].entries[k];
      EXPECT_EQ(e.box, b[i].entries[k].box);
      EXPECT_TRUE(used.insert({e.frame, e.det_idx}).second) << "detection used twice";
      rough.insert(config.classes.rough_of(e.class_id));
      ++counts[identity.at({e.frame, e.det_idx})];
    }
    EXPECT_EQ(rough.size(), 1u);
    int best = 0;
    for (auto [id, n] : counts) best = std::max(best, n);
    pure_entries += best;
    all_entries += a[i].entries.size();
  }
  // Majority-identity purity across all tracklet entries.
  EXPECT_GT(static_cast<double>(pure_entries) / all_entries, 0.95);
  EXPECT_GE(a.size(), 10u);
  EXPECT_LE(a.size(), 30u);
}

TEST(VoteClasses, SingleClass) {
  std::vector<TrackEntry> entries{{1, {0, 0, 1, 1}, 0.5, 4}, {2, {0, 0, 1, 1}, 0.7, 4}};
  for (auto mode : {VoteMode::kHard, VoteMode::kSoft}) {
    const auto votes = vote_classes(entries, {mode, 0.2});
    ASSERT_EQ(votes.size(), 1u);
    EXPECT_EQ(votes[0], (ClassVote{4, 1.0}));
  }
}

TEST(VoteClasses, SoftAndHard) {
  // Class 4 total 6.0, class 5 total 4.0.
  std::vector<TrackEntry> entries;
  for (int i = 0; i < 6; ++i) entries.push_back({i + 1, {0, 0, 1, 1}, 1.0, 4});
  for (int i = 0; i < 8; ++i) entries.push_back({i + 7, {0, 0, 1, 1}, 0.5, 5});
  const auto soft = vote_classes(entries, {VoteMode::kSoft, 0.2});
  ASSERT_EQ(soft.size(), 2u);
  EXPECT_EQ(soft[0].class_id, 4);
  EXPECT_NEAR(soft[0].weight, 0.6, 1e-12);
  EXPECT_EQ(soft[1].class_id, 5);
  EXPECT_NEAR(soft[1].weight, 0.4, 1e-12);
  const auto hard = vote_classes(entries, {VoteMode::kHard, 0.2});
  ASSERT_EQ(hard.size(), 1u);
  EXPECT_EQ(hard[0], (ClassVote{4, 1.0}));
}

TEST(VoteClasses, FloorDropsMinorClassAndTiesPreferLowerId) {
  std::vector<TrackEntry> entries{{1, {0, 0, 1, 1}, 0.9, 4}, {2, {0, 0, 1, 1}, 0.1, 5}};
  const auto soft = vote_classes(entries, {VoteMode::kSoft, 0.2});
  ASSERT_EQ(soft.size(), 1u);
  EXPECT_EQ(soft[0], (ClassVote{4, 1.0}));
  std::vector<TrackEntry> tie{{1, {0, 0, 1, 1}, 0.5, 6}, {2, {0, 0, 1, 1}, 0.5, 5}};
  EXPECT_EQ(vote_classes(tie, {VoteMode::kHard, 0.2})[0].class_id, 5);
}

TEST(VoteClasses, HardIsArgmaxOfSoft) {
  std::mt19937 gen(17);
  std::uniform_real_distribution<double> score(0.01, 1);
  std::uniform_int_distribution<int> cls(0, 3);
  const int classes[] = {4, 5, 6, 9};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TrackEntry> entries;
    for (int f = 1; f <= 15; ++f) entries.push_back({f, {0, 0, 1, 1}, score(gen), classes[cls(gen)]});
    const auto all = vote_classes(entries, {VoteMode::kSoft, 0.0});
    double sum = 0.0;
    for (const auto& v : all) {
      EXPECT_GE(v.weight, 0.0);
      sum += v.weight;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    EXPECT_EQ(vote_classes(entries, {VoteMode::kHard, 0.2})[0].class_id, all[0].class_id);
  }
}

TEST(VoteClasses, EmptyThrows) {
  EXPECT_THROW(vote_classes({}, VoteConfig{}), PreconditionError);
}

}  // namespace
}  // namespace mot
