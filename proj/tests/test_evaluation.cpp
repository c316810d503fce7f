#include <gtest/gtest.h>

#include "mot/errors.hpp"
#include "mot/evaluation.hpp"

namespace mot {
namespace {

Trajectory track(int id, int first, int last, double x, double score, int cls = 1) {
  Trajectory t{id, {}, {{cls, 1.0}}, 0};
  for (int f = first; f <= last; ++f) t.entries.push_back({f, {x, 0, 10, 10}, score, cls});
  return t;
}

std::vector<Trajectory> scene() {
  return {track(1, 1, 50, 0, 1.0), track(2, 10, 60, 100, 1.0), track(3, 1, 40, 300, 1.0, 4)};
}

TEST(Evaluate, IdenticalSetsScoreOne) {
  const auto gt = scene();
  const auto r = evaluate(gt, gt);
  EXPECT_EQ(r.map, 1.0);
  for (double t : kDefaultEvalThresholds) EXPECT_EQ(r.map_at(t), 1.0);
}

TEST(Evaluate, NoPredictionsScoreZero) {
  EXPECT_EQ(evaluate({}, scene()).map, 0.0);
}

TEST(Evaluate, EmptyGroundTruthThrows) {
  EXPECT_THROW(evaluate(scene(), {}), InputError);
}

TEST(Evaluate, DuplicateAfterFullRecallKeepsApOne) {
  const std::vector<Trajectory> gt{track(1, 1, 20, 0, 1.0)};
  const std::vector<Trajectory> pred{track(1, 1, 20, 0, 0.9), track(2, 1, 20, 0, 0.8)};
  const auto r = evaluate(pred, gt);
  for (double t : kDefaultEvalThresholds) EXPECT_EQ(r.ap(1, t), 1.0);
  EXPECT_EQ(r.classes[0].matched[0], 1);
}

TEST(Evaluate, FalsePositiveRankedFirstHalvesPrecision) {
  // Ranked: FP (0.9) then TP (0.8). Precision at the TP is 1/2.
  const std::vector<Trajectory> gt{track(1, 1, 20, 0, 1.0)};
  const std::vector<Trajectory> pred{track(7, 1, 20, 500, 0.9), track(8, 1, 20, 0, 0.8)};
  EXPECT_DOUBLE_EQ(evaluate(pred, gt).ap(1, 0.5), 0.5);
}

TEST(Evaluate, ThresholdDecidesMatch) {
  // Tube IoU of frames 1..10 against 1..20 is 0.5.
  const std::vector<Trajectory> gt{track(1, 1, 20, 0, 1.0)};
  const std::vector<Trajectory> pred{track(1, 1, 10, 0, 0.9)};
  const auto r = evaluate(pred, gt);
  EXPECT_EQ(r.ap(1, 0.25), 1.0);
  EXPECT_EQ(r.ap(1, 0.5), 1.0);
  EXPECT_EQ(r.ap(1, 0.75), 0.0);
}

TEST(Evaluate, ScoreScalingInvariance) {
  auto pred = scene();
  pred[0].entries.resize(25);
  pred[1].entries[3].score = 0.3;
  pred.push_back(track(9, 1, 30, 5, 0.6));
  const auto base = evaluate(pred, scene());
  for (auto& t : pred)
    for (auto& e : t.entries) e.score *= 3.0;
  const auto scaled = evaluate(pred, scene());
  EXPECT_EQ(base.map, scaled.map);
}

TEST(Evaluate, MultiVoteTrajectoriesSplit) {
  auto pred = scene();
  pred[2].class_votes = {{4, 0.7}, {5, 0.3}};
  const auto r = evaluate(pred, scene());
  EXPECT_EQ(r.ap(4, 0.5), 1.0);
  EXPECT_EQ(r.classes.size(), 2u);  // class 5 has no ground truth
}

TEST(EvalReport, KeyValuesListEveryCell) {
  const auto r = evaluate(scene(), scene());
  const std::string kv = r.to_key_values();
  EXPECT_NE(kv.find("map=1\n"), std::string::npos);
  EXPECT_NE(kv.find("ap.4@0.5=1\n"), std::string::npos);
  EXPECT_FALSE(r.to_table().empty());
}

}  // namespace
}  // namespace mot
