#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <set>

#include "coarse/coarse.hpp"

using namespace coarse;

namespace {

int l1(const VertexKey& a, const VertexKey& b) { return std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]); }

}  // namespace

TEST(Hyperbolicity, TreeIsZeroEverywhere) {
  auto ball = materialize_ball(make_oracle("t3"), 12);
  auto e = hyperbolicity_estimate(ball, 500, 1);
  ASSERT_EQ(e.rungs.size(), 6u);
  for (const auto& r : e.rungs) EXPECT_EQ(r.twice_delta, 0) << r.radius;
  EXPECT_EQ(e.trend, DeltaTrend::Plateau);
}

TEST(Hyperbolicity, ExhaustiveRungMatchesL1Oracle) {
  // S(3) in Z^2 has 12 points, so the rung sees all 495 quadruples.
  auto ball = materialize_ball(make_oracle("z2"), 6);
  auto e = hyperbolicity_estimate(ball, 500, 4);
  const auto& rung = e.rungs[2];
  ASSERT_EQ(rung.radius, 3);
  ASSERT_EQ(rung.pool, 12);
  ASSERT_EQ(rung.quadruples, 495);
  std::vector<VertexKey> sphere;
  for (int x = -3; x <= 3; ++x)
    for (int y = -3; y <= 3; ++y)
      if (std::abs(x) + std::abs(y) == 3) sphere.push_back({x, y});
  int best = 0;
  for (std::size_t a = 0; a < sphere.size(); ++a)
    for (std::size_t b = a + 1; b < sphere.size(); ++b)
      for (std::size_t c = b + 1; c < sphere.size(); ++c)
        for (std::size_t d = c + 1; d < sphere.size(); ++d) {
          std::array<int, 3> s{l1(sphere[a], sphere[b]) + l1(sphere[c], sphere[d]),
                               l1(sphere[a], sphere[c]) + l1(sphere[b], sphere[d]),
                               l1(sphere[a], sphere[d]) + l1(sphere[b], sphere[c])};
          std::sort(s.begin(), s.end());
          best = std::max(best, s[2] - s[1]);
        }
  EXPECT_EQ(rung.twice_delta, best);
  // The reported witness attains it.
  const auto& w = rung.witness;
  std::array<int, 3> s{l1(w[0], w[1]) + l1(w[2], w[3]), l1(w[0], w[2]) + l1(w[1], w[3]),
                       l1(w[0], w[3]) + l1(w[1], w[2])};
  std::sort(s.begin(), s.end());
  EXPECT_EQ(s[2] - s[1], best);
}

TEST(Hyperbolicity, Z2GrowsAndTilingPlateaus) {
  auto z2 = hyperbolicity_estimate(materialize_ball(make_oracle("z2"), 40), 500, 1);
  EXPECT_EQ(z2.trend, DeltaTrend::Growing);
  EXPECT_GT(z2.slope, 0);
  auto t37 = hyperbolicity_estimate(materialize_ball(make_oracle("tiling-3-7"), 10), 500, 1);
  EXPECT_EQ(t37.trend, DeltaTrend::Plateau);
  for (std::size_t k = 2; k < t37.rungs.size(); ++k) EXPECT_LE(t37.rungs[k].delta(), 1.0);
}

TEST(Hyperbolicity, SeedDeterminesEstimate) {
  auto ball = materialize_ball(make_oracle("z3"), 14);
  auto a = hyperbolicity_estimate(ball, 200, 11), b = hyperbolicity_estimate(ball, 200, 11);
  ASSERT_EQ(a.rungs.size(), b.rungs.size());
  for (std::size_t k = 0; k < a.rungs.size(); ++k) {
    EXPECT_EQ(a.rungs[k].twice_delta, b.rungs[k].twice_delta);
    EXPECT_EQ(a.rungs[k].witness, b.rungs[k].witness);
  }
  EXPECT_EQ(a.slope, b.slope);
}

TEST(Hyperbolicity, Preconditions) {
  auto ball = materialize_ball(make_oracle("z2"), 5);
  EXPECT_THROW(hyperbolicity_estimate(ball), PreconditionError);
  EXPECT_THROW(hyperbolicity_estimate(materialize_ball(make_oracle("z2"), 6), 0), PreconditionError);
}

TEST(Decide, TableIsTotal) {
  // Every combination of evidence lands in exactly one label, and the label
  // agrees with an independent reading of the table.
  const std::vector<std::vector<std::pair<int, int>>> wides{
      {{1, 2}}, {{1, 2}, {2, 2}}, {{1, 0}}, {{1, 1}, {2, 2}}, {{1, 2}, {2, 3}}, {{1, 7}}};
  const std::vector<double> slopes{0.5, 1.69, 1.7, 2.0, 2.3, 2.31, 6.0};
  for (const auto& w : wides)
    for (double slope : slopes)
      for (bool sp : {false, true})
        for (auto trend : {DeltaTrend::Growing, DeltaTrend::Plateau}) {
          ExponentFit fit;
          fit.slope = slope;
          fit.super_polynomial = sp;
          const auto d = decide(w, 30, fit, trend);
          const bool all_two = std::all_of(w.begin(), w.end(), [](auto p) { return p.second == 2; });
          Label expect;
          if (!all_two) expect = Label::UbqFails;
          else if (slope >= 1.7 && slope <= 2.3 && trend == DeltaTrend::Growing) expect = Label::EuclideanPlaneLike;
          else if (trend == DeltaTrend::Plateau && sp) expect = Label::HyperbolicPlaneLike;
          else expect = Label::Indeterminate;
          EXPECT_EQ(d.label, expect) << slope << " " << sp << " " << to_string(trend);
          EXPECT_FALSE(d.reason.empty());
        }
}

TEST(Decide, ConflictingEvidenceExplains) {
  ExponentFit fit;
  fit.slope = 2.0;
  auto d = decide({{1, 2}}, 30, fit, DeltaTrend::Plateau);
  EXPECT_EQ(d.label, Label::Indeterminate);
  EXPECT_NE(d.reason.find("conflicting"), std::string::npos);
}

TEST(Classify, Z2) {
  auto v = classify("z2");
  EXPECT_EQ(v.label, Label::EuclideanPlaneLike) << v.reason;
  EXPECT_EQ(v.R, 60);
  ASSERT_EQ(v.ubq.size(), 2u);
  for (const auto& p : v.ubq) EXPECT_EQ(p.wide_count, 2);
}

TEST(Classify, UbqFailures) {
  for (const char* fam : {"z3", "t3", "z"}) {
    auto v = classify(fam);
    EXPECT_EQ(v.label, Label::UbqFails) << fam << ": " << v.reason;
  }
}

TEST(Classify, BallCapTooSmall) {
  ClassifyConfig cfg;
  cfg.ball_cap = 50;
  EXPECT_THROW(classify("z2", cfg), PreconditionError);
  cfg = {};
  cfg.sigmas.clear();
  EXPECT_THROW(classify("z2", cfg), PreconditionError);
}

TEST(VaropoulosSweep, DeterministicAndPassing) {
  auto o = make_oracle("heisenberg");
  auto a = varopoulos_sweep(o, 8, 200, 5, 150), b = varopoulos_sweep(o, 8, 200, 5, 150);
  EXPECT_TRUE(a.all_pass());
  EXPECT_EQ(a.max_ratio, b.max_ratio);
  EXPECT_GT(a.max_ratio, 0);
  EXPECT_LE(a.max_ratio, 1);
  EXPECT_THROW(varopoulos_sweep(o, 1, 10, 1), PreconditionError);
  EXPECT_THROW(varopoulos_sweep(o, 5, 0, 1), PreconditionError);
}

TEST(Report, EnvelopeShape) {
  auto j = envelope("x", Json{{"a", 1}}, Json{{"b", 2}}, false);
  EXPECT_EQ(j.dump(), R"({"schema":1,"command":"x","config":{"a":1},"result":{"b":2}})");
  auto m = envelope("x", Json::object(), Json::object(), true);
  EXPECT_TRUE(m.contains("meta"));
}

TEST(Report, ComponentColoursAreStable) {
  std::set<std::string> seen;
  for (int id = 0; id < 8; ++id) seen.insert(component_colour(id));
  EXPECT_EQ(seen.size(), 8u);
  EXPECT_STREQ(component_colour(3), component_colour(11));
}
