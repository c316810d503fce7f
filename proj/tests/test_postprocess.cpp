#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "mot/errors.hpp"
#include "mot/postprocess.hpp"

namespace mot {
namespace {

Trajectory track(int id, int first, int last, double x, double score, int cls = 1) {
  Trajectory t{id, {}, {{cls, 1.0}}, 0};
  for (int f = first; f <= last; ++f) t.entries.push_back({f, {x, 0, 10, 10}, score, cls});
  return t;
}

TEST(Denoise, IdenticalCopyRemoved) {
  const auto a = track(1, 1, 10, 0, 0.9);
  const auto b = track(2, 1, 10, 0, 0.8);
  const auto out = denoise(std::vector<Trajectory>{b, a}, PostConfig{});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].id, 1);
}

TEST(Denoise, DisjointUnchanged) {
  const std::vector<Trajectory> in{track(1, 1, 10, 0, 0.9), track(2, 1, 10, 100, 0.8)};
  const auto out = denoise(in, PostConfig{});
  ASSERT_EQ(out.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(out[k].id, in[k].id);
    for (std::size_t e = 0; e < in[k].entries.size(); ++e) {
      EXPECT_EQ(out[k].entries[e].score, in[k].entries[e].score);
    }
  }
}

TEST(Denoise, HalfOverlapHalvesScores) {
  // Same boxes, frames 1..10 vs 1..20 gives tube IoU 10/20.
  const auto top = track(1, 1, 10, 0, 0.9);
  const auto other = track(2, 1, 20, 0, 0.8);
  const auto out = denoise(std::vector<Trajectory>{top, other}, PostConfig{});
  ASSERT_EQ(out.size(), 2u);
  for (const auto& e : out[1].entries) EXPECT_NEAR(e.score, 0.4, 1e-15);
}

TEST(Denoise, OtherClassesUntouched) {
  const auto a = track(1, 1, 10, 0, 0.9, 1);
  const auto b = track(2, 1, 10, 0, 0.8, 4);
  EXPECT_EQ(denoise(std::vector<Trajectory>{a, b}, PostConfig{}).size(), 2u);
}

TEST(Interpolate, Midpoint) {
  Trajectory t{1, {}, {}, 0};
  t.entries.push_back({10, {0, 0, 10, 10}, 0.5, 1});
  t.entries.push_back({14, {8, 0, 10, 10}, 0.9, 1});
  const auto out = interpolate(t, 60);
  ASSERT_EQ(out.entries.size(), 5u);
  EXPECT_EQ(out.entries[2].frame, 12);
  EXPECT_EQ(out.entries[2].box, (Box{4, 0, 10, 10}));
  EXPECT_NEAR(out.entries[2].score, 0.7, 1e-15);
  EXPECT_TRUE(out.entries[2].interpolated);
  EXPECT_FALSE(out.entries[0].interpolated);
}

TEST(Interpolate, GapOfMaxGapUntouched) {
  Trajectory t{1, {}, {}, 0};
  t.entries.push_back({1, {0, 0, 10, 10}, 0.5, 1});
  t.entries.push_back({62, {8, 0, 10, 10}, 0.9, 1});  // 60 missing
  EXPECT_EQ(interpolate(t, 60).entries.size(), 2u);
  t.entries[1].frame = 61;  // 59 missing
  EXPECT_EQ(interpolate(t, 60).entries.size(), 61u);
}

TEST(Interpolate, NoGapsIsIdentity) {
  const auto t = track(1, 1, 5, 3, 0.6);
  const auto out = interpolate(t, 60);
  ASSERT_EQ(out.entries.size(), t.entries.size());
  for (std::size_t k = 0; k < t.entries.size(); ++k) EXPECT_EQ(out.entries[k].box, t.entries[k].box);
}

TEST(Interpolate, PreservesEntriesAndStaysOnSegment) {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> u(0, 50);
  std::uniform_int_distribution<int> step(1, 8);
  for (int trial = 0; trial < 100; ++trial) {
    Trajectory t{1, {}, {}, 0};
    int f = 1;
    for (int k = 0; k < 10; ++k) {
      t.entries.push_back({f, {u(gen), u(gen), 1 + u(gen), 1 + u(gen)}, u(gen) / 50, 1});
      f += step(gen);
    }
    const auto out = interpolate(t, 60);
    std::size_t src = 0;
    for (std::size_t k = 0; k < out.entries.size(); ++k) {
      const auto& e = out.entries[k];
      if (!e.interpolated) {
        EXPECT_EQ(e.box, t.entries[src].box);
        EXPECT_EQ(e.score, t.entries[src].score);
        ++src;
        continue;
      }
      const auto& a = t.entries[src - 1].box;
      const auto& b = t.entries[src].box;
      auto between = [](double v, double p, double q) {
        return v >= std::min(p, q) - 1e-12 && v <= std::max(p, q) + 1e-12;
      };
      EXPECT_TRUE(between(e.box.left, a.left, b.left));
      EXPECT_TRUE(between(e.box.top, a.top, b.top));
      EXPECT_TRUE(between(e.box.width, a.width, b.width));
      EXPECT_TRUE(between(e.box.height, a.height, b.height));
    }
    EXPECT_EQ(src, t.entries.size());
  }
}

TEST(RescoreWeight, Values) {
  EXPECT_EQ(rescore_weight(0, 25), 0.0);
  const double e = std::exp(-1.0);
  EXPECT_NEAR(rescore_weight(25, 25), (1 - e) / (1 + e), 1e-15);
  EXPECT_NEAR(rescore_weight(25, 25), 0.462117, 1e-6);
  EXPECT_NEAR(rescore_weight(1e6, 25), 1.0, 1e-12);
  EXPECT_THROW(rescore_weight(1, 0), InputError);
}

TEST(RescoreWeight, Monotonicity) {
  for (int l = 1; l < 500; ++l) {
    EXPECT_LT(rescore_weight(l, 25), rescore_weight(l + 1, 25));
    EXPECT_GT(rescore_weight(l, 20), rescore_weight(l, 25));
    EXPECT_LT(rescore_weight(l, 25), 1.0);
  }
}

TEST(Rescore, ScalesEveryScore) {
  const auto t = track(1, 1, 25, 0, 0.8);
  const auto out = rescore(t, 25);
  for (const auto& e : out.entries) EXPECT_DOUBLE_EQ(e.score, 0.8 * rescore_weight(25, 25));
}

TEST(TrackNms, SelfFusionIsIdempotent) {
  const std::vector<Trajectory> x{track(4, 1, 10, 0, 0.9), track(8, 1, 10, 100, 0.7),
                                  track(9, 5, 30, 300, 0.5, 4)};
  const std::vector<std::vector<Trajectory>> sets{x, x};
  const auto fused = tracknms(sets, PostConfig{});
  ASSERT_EQ(fused.size(), x.size());
  std::set<int> ids;
  for (const auto& t : fused) ids.insert(t.id);
  EXPECT_EQ(ids.size(), fused.size());
}

TEST(TrackNms, FuseWithEmpty) {
  const std::vector<Trajectory> x{track(4, 1, 10, 0, 0.9), track(8, 1, 10, 100, 0.7)};
  const std::vector<std::vector<Trajectory>> sets{x, {}};
  const auto fused = tracknms(sets, PostConfig{});
  ASSERT_EQ(fused.size(), 2u);
  EXPECT_EQ(fused[0].entries.front().box, x[0].entries.front().box);
  EXPECT_EQ(fused[0].entries.front().score, x[0].entries.front().score);
}

TEST(TrackNms, SumOfScoresRanks) {
  // 120 frames x 0.5 = 60 outranks 20 frames x 0.9 = 18.
  const auto long_low = track(1, 1, 120, 0, 0.5);
  const auto short_high = track(2, 1, 20, 0, 0.9);
  const std::vector<std::vector<Trajectory>> sets{{short_high}, {long_low}};
  const auto fused = tracknms(sets, PostConfig{});
  ASSERT_GE(fused.size(), 1u);
  EXPECT_EQ(fused[0].entries.size(), 120u);
  // Denoise ranks by mean and keeps the short one first.
  const auto denoised = denoise(std::vector<Trajectory>{long_low, short_high}, PostConfig{});
  EXPECT_EQ(denoised[0].entries.size(), 20u);
}

TEST(PostProcess, NeverRaisesScoresOrMovesBoxesInSuppression) {
  std::vector<Trajectory> in;
  for (int k = 0; k < 6; ++k) in.push_back(track(k + 1, 1 + k, 30 + k, 2.0 * k, 0.5 + 0.05 * k));
  PostConfig config;
  const auto out = denoise(in, config);
  for (const auto& t : out) {
    const auto& src = in[t.id - 1];
    for (std::size_t e = 0; e < t.entries.size(); ++e) {
      EXPECT_LE(t.entries[e].score, src.entries[e].score);
      EXPECT_EQ(t.entries[e].box, src.entries[e].box);
    }
  }
}

TEST(PostProcess, AllStagesDisabledIsIdentity) {
  const std::vector<Trajectory> in{track(1, 1, 10, 0, 0.9), track(2, 3, 8, 0, 0.8)};
  PostConfig config;
  config.denoise = config.interpolate = config.rescore = false;
  const auto out = post_process(in, config);
  ASSERT_EQ(out.size(), in.size());
  for (std::size_t k = 0; k < in.size(); ++k) {
    ASSERT_EQ(out[k].entries.size(), in[k].entries.size());
    for (std::size_t e = 0; e < in[k].entries.size(); ++e) {
      EXPECT_EQ(out[k].entries[e].score, in[k].entries[e].score);
    }
  }
}

}  // namespace
}  // namespace mot
