#include <gtest/gtest.h>

#include <boost/pending/disjoint_sets.hpp>

#include <cstdlib>
#include <map>
#include <random>

#include "coarse/separation.hpp"
#include "support.hpp"

using namespace coarse;
using namespace testsupport;

namespace {

// Deep components of {|x|+|y| <= R, |y| > sigma} by union-find on coordinates.
int z2_axis_deep_components(int R, int sigma, int D) {
  std::map<std::pair<int, int>, int> id;
  for (int x = -R; x <= R; ++x)
    for (int y = -R; y <= R; ++y)
      if (std::abs(x) + std::abs(y) <= R && std::abs(y) > sigma) id[{x, y}] = static_cast<int>(id.size());
  std::vector<int> rank(id.size()), parent(id.size());
  boost::disjoint_sets<int*, int*> ds(rank.data(), parent.data());
  for (auto& [p, i] : id) ds.make_set(i);
  for (auto& [p, i] : id) {
    for (auto q : {std::pair{p.first + 1, p.second}, std::pair{p.first, p.second + 1}}) {
      if (auto it = id.find(q); it != id.end()) ds.union_set(i, it->second);
    }
  }
  std::map<int, int> depth;
  for (auto& [p, i] : id) {
    int& d = depth[ds.find_set(i)];
    d = std::max(d, std::abs(p.second));
  }
  int deep = 0;
  for (auto& [root, d] : depth) deep += d >= D;
  return deep;
}

}  // namespace

TEST(ComplementComponents, Z2AxisHasTwoDeepHalves) {
  auto o = make_oracle("z2");
  auto ball = materialize_ball(o, 40);
  auto dec = complement_components(ball, axis_segment(o, "x", 40), 1, 15);
  EXPECT_EQ(dec.deep_count(), z2_axis_deep_components(40, 1, 15));
  EXPECT_EQ(dec.deep_count(), 2);
  EXPECT_EQ(dec.wide_count(), 2);
}

TEST(ComplementComponents, Z3AxisHasOneDeepComponent) {
  auto o = make_oracle("z3");
  auto ball = materialize_ball(o, 25);
  auto dec = complement_components(ball, axis_segment(o, "x", 25), 2, 10);
  EXPECT_EQ(dec.deep_count(), 1);
}

TEST(ComplementComponents, TreeGeodesicBranches) {
  // Off-axis neighbour of the axis vertex at signed position k sits in
  // N_1(axis); its two children root components reaching depth R - |k|.
  // Deep iff |k| <= R - D, giving 2 (2 (R - D) + 1) components.
  auto o = make_oracle("t3");
  for (int R : {10, 12}) {
    auto ball = materialize_ball(o, R);
    auto dec = complement_components(ball, axis_segment(o, "ray", R), 1, 5);
    EXPECT_EQ(dec.deep_count(), 2 * (2 * (R - 5) + 1)) << R;
    EXPECT_GE(dec.deep_count(), 3);
  }
}

TEST(ComplementComponents, PartitionsTheBall) {
  auto o = make_oracle("heisenberg");
  auto ball = materialize_ball(o, 8);
  auto dec = complement_components(ball, axis_segment(o, "x", 8), 1, 2);
  int total = dec.neighborhood_size;
  for (const auto& c : dec.components) total += c.size;
  EXPECT_EQ(total, ball.size());
  for (int v = 0; v < ball.size(); ++v) {
    EXPECT_EQ(dec.in_neighborhood(v), dec.dist_to_base[v] <= 1);
  }
}

TEST(UbqProbe, TrichotomyExamples) {
  ProbeParams z2{1, 0, 1, 20, 60};
  auto r2 = ubq_probe(make_oracle("z2"), "x", z2);
  EXPECT_EQ(r2.wide_count, 2);
  EXPECT_EQ(r2.verdict, UbqVerdict::ConsistentWithUbq);
  EXPECT_TRUE(r2.certificate.certified());

  ProbeParams z1{1, 0, 1, 5, 30};
  auto r1 = ubq_probe(make_oracle("z1"), "x", z1);
  EXPECT_EQ(r1.wide_count, 0);
  EXPECT_EQ(r1.verdict, UbqVerdict::TooFewWide);

  ProbeParams z3{1, 0, 2, 10, 25};
  auto r3 = ubq_probe(make_oracle("z3"), "x", z3);
  EXPECT_EQ(r3.wide_count, 1);
  EXPECT_EQ(r3.verdict, UbqVerdict::TooFewWide);

  ProbeParams t3{1, 0, 1, 5, 12};
  auto rt = ubq_probe(make_oracle("t3"), "ray", t3);
  EXPECT_GE(rt.wide_count, 3);
  EXPECT_EQ(rt.verdict, UbqVerdict::TooManyWide);
}

TEST(UbqProbe, GeodesicOnlyModeRejectsBentSegment) {
  auto o = make_oracle("z2");
  // A there-and-back hook is a (3,2)-quasi-geodesic but not a geodesic.
  auto hook = polyline({{-20, 0}, {0, 0}, {0, 1}, {-1, 1}});
  ProbeParams params{3, 2, 1, 5, 20};
  EXPECT_NO_THROW(ubq_probe(o, hook, params));
  params.mode = ProbeMode::GeodesicOnly;
  EXPECT_THROW(ubq_probe(o, hook, params), PreconditionError);
}

TEST(UbqProbe, HyperbolicTilingAxis) {
  auto o = make_oracle("tiling-4-5");
  ProbeParams params{1, 0, 1, 3, 6};
  auto rep = ubq_probe(o, "ray", params);
  EXPECT_TRUE(rep.certificate.certified());
  EXPECT_EQ(rep.wide_count, 2);
  EXPECT_EQ(rep.verdict, UbqVerdict::ConsistentWithUbq);
  // At D = 2 single rim vertices two steps off the ray count as wide.
  auto shallow = complement_components(materialize_ball(o, 6), rep.segment, 1, 2);
  EXPECT_EQ(shallow.wide_count(), 10);
  int singletons = 0;
  for (const auto& c : shallow.components) singletons += c.wide() && c.size == 1;
  EXPECT_EQ(singletons, 8);
}

TEST(SigmaSweep, Z2AllSigmasBisect) {
  auto o = make_oracle("z2");
  ProbeParams params{1, 0, 1, 20, 60};
  auto sweep = sigma_sweep(o, axis_segment(o, "x", 60), {1, 2, 4, 8}, params);
  ASSERT_EQ(sweep.size(), 4u);
  for (const auto& r : sweep) EXPECT_EQ(r.wide_count, 2) << r.sigma;
}

TEST(SigmaSweep, TreeStaysAboveTwo) {
  auto o = make_oracle("t3");
  ProbeParams params{1, 0, 1, -1, 12};
  for (const auto& r : sigma_sweep(o, axis_segment(o, "ray", 12), {1, 2, 3}, params)) {
    EXPECT_GE(r.wide_count, 3) << r.sigma;
  }
}

TEST(SigmaSweep, NeighbourhoodSwallowsBall) {
  auto o = make_oracle("z2");
  ProbeParams params{1, 0, 1, 3, 10};
  auto sweep = sigma_sweep(o, axis_segment(o, "x", 10), {11}, params);
  EXPECT_TRUE(sweep[0].components.empty());
  ASSERT_FALSE(sweep[0].warnings.empty());
  EXPECT_NE(sweep[0].warnings[0].find("empty decomposition"), std::string::npos);
}

TEST(SigmaSweep, DeepCountIsTwoAcrossScales) {
  auto o = make_oracle("z2");
  const int D = 2;
  for (int sigma = 1; sigma <= 8; ++sigma) {
    const int R = 6 * (sigma + D);
    auto ball = materialize_ball(o, R);
    auto dec = complement_components(ball, axis_segment(o, "x", R), sigma, D);
    EXPECT_EQ(dec.deep_count(), 2) << sigma;
    EXPECT_EQ(dec.deep_count(), z2_axis_deep_components(R, sigma, D));
  }
}

TEST(EndsProbe, Examples) {
  EXPECT_EQ(ends_probe(make_oracle("z2"), 5, 40, 20).count, 1);
  EXPECT_EQ(ends_probe(make_oracle("t3"), 2, 12, 6).count, 6);
  EXPECT_EQ(ends_probe(make_oracle("z1"), 3, 20, 5).count, 2);
  EXPECT_THROW(ends_probe(make_oracle("z2"), 5, 10, 6), PreconditionError);
}

TEST(EndsProbe, OneEndedFamiliesAndGrowingTree) {
  for (auto [r, R] : {std::pair{2, 8}, {3, 10}}) {
    EXPECT_EQ(ends_probe(make_oracle("z2"), r, R, 3).count, 1);
    EXPECT_EQ(ends_probe(make_oracle("heisenberg"), r, R, 3).count, 1);
    EXPECT_EQ(ends_probe(make_oracle("tiling-4-5"), r, R, 3).count, 1);
  }
  int prev = 0;
  for (int r = 1; r <= 4; ++r) {
    const int ends = ends_probe(make_oracle("t3"), r, 12, 4).count;
    EXPECT_EQ(ends, 3 << (r - 1));
    EXPECT_GT(ends, prev);
    prev = ends;
  }
}

TEST(FindWitnessPair, Z2Axis) {
  auto o = make_oracle("z2");
  auto ball = materialize_ball(o, 50);
  auto search = find_witness_pair(ball, axis_segment(o, "x", 50), 1, 15);
  ASSERT_TRUE(search.pair);
  const auto& p = *search.pair;
  EXPECT_EQ(p.w1.front(), (VertexKey{0, 2}));
  EXPECT_EQ(p.w2.front(), (VertexKey{0, -2}));
  for (int t = 0; t <= p.w1.length(); ++t) EXPECT_EQ(p.w1[t], (VertexKey{0, 2 + t}));
  for (int t = 0; t <= p.w2.length(); ++t) EXPECT_EQ(p.w2[t], (VertexKey{0, -2 - t}));
  for (const auto* prof : {&p.profile1, &p.profile2}) {
    for (std::size_t t = 1; t < prof->size(); ++t) EXPECT_GT((*prof)[t], (*prof)[t - 1]);
    EXPECT_GE(prof->back(), 15);
  }
  // Profiles agree with the distance to the x-axis.
  for (int t = 0; t <= p.w1.length(); ++t) EXPECT_EQ(p.profile1[t], std::abs(p.w1[t][1]));
}

TEST(FindWitnessPair, Z3Absent) {
  auto o = make_oracle("z3");
  auto ball = materialize_ball(o, 20);
  auto search = find_witness_pair(ball, axis_segment(o, "x", 20), 2, 8);
  EXPECT_FALSE(search.pair);
  EXPECT_EQ(search.components.size(), 1u);
  EXPECT_FALSE(search.reason.empty());
}

TEST(FindWitnessPair, TreeDrawsFromTwoBranches) {
  auto o = make_oracle("t3");
  auto ball = materialize_ball(o, 12);
  auto rho = axis_segment(o, "ray", 12);
  auto search = find_witness_pair(ball, rho, 1, 5);
  ASSERT_TRUE(search.pair);
  EXPECT_NE(search.pair->component1, search.pair->component2);
  EXPECT_GE(search.pair->profile1.back(), 5);
  EXPECT_GE(search.pair->profile2.back(), 5);
  check_path(*o, search.pair->w1);
  check_path(*o, search.pair->w2);
}

class ProtectionFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    o = make_oracle("z2");
    ball = std::make_unique<Ball>(materialize_ball(o, 40));
    rho1 = axis_segment(o, "x", 40);
    pair = *find_witness_pair(*ball, rho1, 1, 13).pair;
  }
  OraclePtr o;
  std::unique_ptr<Ball> ball;
  PathRecord rho1;
  WitnessPair pair;
};

TEST_F(ProtectionFixture, RectangularDetour) {
  auto rho2 = polyline({{-40, 0}, {-5, 0}, {-5, 5}, {5, 5}, {5, 0}, {40, 0}});
  auto rep = witness_protection_demo(*ball, rho1, rho2, pair, 1, 5);
  EXPECT_EQ(rep.hausdorff, 5);
  EXPECT_TRUE(rep.preserved) << rep.detail;
}

TEST_F(ProtectionFixture, Identity) {
  auto rep = witness_protection_demo(*ball, rho1, rho1, pair, 1, 0);
  EXPECT_TRUE(rep.preserved);
  EXPECT_EQ(rep.trim1, 0);
}

TEST_F(ProtectionFixture, VerticalShift) {
  std::vector<std::pair<int, int>> xy;
  for (int x = -37; x <= 37; ++x) xy.push_back({x, 3});
  auto rho2 = pts(xy);
  auto rep = witness_protection_demo(*ball, rho1, rho2, pair, 1, 6);
  EXPECT_TRUE(rep.preserved) << rep.detail;
  // w1 = (0,2),(0,3),... must drop everything within 1 + H of the axis.
  EXPECT_GE(rep.trim1, 3 + 1);
}

TEST_F(ProtectionFixture, HausdorffBoundViolated) {
  auto rho2 = polyline({{-40, 0}, {-5, 0}, {-5, 5}, {5, 5}, {5, 0}, {40, 0}});
  EXPECT_THROW(witness_protection_demo(*ball, rho1, rho2, pair, 1, 4), PreconditionError);
}

class ChordFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    o = make_oracle("z2");
    ball = std::make_unique<Ball>(materialize_ball(o, 70));
    rho = axis_segment(o, "x", 70);
    pair = *find_witness_pair(*ball, rho, 1, 20).pair;
    p = polyline({{0, 2}, {0, -2}});
  }
  OraclePtr o;
  std::unique_ptr<Ball> ball;
  PathRecord rho, p;
  WitnessPair pair;
};

TEST_F(ChordFixture, UpperDetourMeetsUpperWitness) {
  auto q = polyline({{-20, 0}, {-20, 15}, {20, 15}, {20, 0}});
  auto rep = chord_witness_check(*ball, rho, pair, p, q, 1);
  ASSERT_TRUE(rep.hypotheses_hold()) << rep.detail;
  EXPECT_TRUE(rep.w1_meets);
  EXPECT_FALSE(rep.w2_meets);
  EXPECT_FALSE(rep.contradiction);
}

TEST_F(ChordFixture, LowerDetourMeetsLowerWitness) {
  auto q = polyline({{-20, 0}, {-20, -15}, {20, -15}, {20, 0}});
  auto rep = chord_witness_check(*ball, rho, pair, p, q, 1);
  ASSERT_TRUE(rep.hypotheses_hold()) << rep.detail;
  EXPECT_FALSE(rep.w1_meets);
  EXPECT_TRUE(rep.w2_meets);
}

TEST_F(ChordFixture, HuggingDetourFailsClauseSix) {
  // Height 10 passes within 10 sigma of p's top end (0,2).
  auto q = polyline({{-20, 0}, {-20, 10}, {20, 10}, {20, 0}});
  auto rep = chord_witness_check(*ball, rho, pair, p, q, 1);
  ASSERT_TRUE(rep.violated_clause);
  EXPECT_EQ(*rep.violated_clause, 6);
}

TEST_F(ChordFixture, BrokenConnectorFailsClauseFour) {
  auto rep = chord_witness_check(*ball, rho, pair, polyline({{0, 2}, {0, -1}}),
                                 polyline({{-20, 0}, {-20, 15}, {20, 15}, {20, 0}}), 1);
  ASSERT_TRUE(rep.violated_clause);
  EXPECT_EQ(*rep.violated_clause, 4);
}

TEST_F(ChordFixture, RandomValidScenariosNeverMissBoth) {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 50; ++k) {
    auto q = ragged_detour(rng);
    const int sign = q.vertices[1][1] > 0 ? 1 : -1;
    auto rep = chord_witness_check(*ball, rho, pair, p, q, 1);
    ASSERT_TRUE(rep.hypotheses_hold()) << k << ": " << rep.detail;
    EXPECT_FALSE(rep.contradiction) << k;
    EXPECT_EQ(rep.w1_meets, sign > 0) << k;
  }
}
