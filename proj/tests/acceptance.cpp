// Runs the ten acceptance criteria. One line per criterion; exit status is
// the number of failures.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "support.hpp"

using namespace coarse;
using namespace testsupport;

namespace {

struct Outcome {
  bool ok = true;
  std::string note;
};

// Collects the first few failed checks of a criterion.
struct Check {
  Outcome out;
  int failures = 0;
  void operator()(bool cond, const std::string& what) {
    if (cond) return;
    out.ok = false;
    if (++failures <= 3) out.note += (out.note.empty() ? "" : "; ") + what;
  }
};

Outcome growth_exactness() {
  Check check;
  auto timed = [](auto f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  GrowthTable z2, t3;
  const double tz = timed([&] { z2 = growth_table(make_oracle("z2"), 40); });
  const double tt = timed([&] { t3 = growth_table(make_oracle("t3"), 15); });
  check(z2.attained() == 40 && !z2.partial, "z2 table incomplete");
  check(t3.attained() == 15 && !t3.partial, "t3 table incomplete");
  for (std::int64_t n = 0; n <= std::min(40, z2.attained()); ++n) {
    check(z2(n) == 2 * n * n + 2 * n + 1, "z2 G(" + std::to_string(n) + ")=" + std::to_string(z2(n)));
  }
  for (int n = 0; n <= std::min(15, t3.attained()); ++n) {
    check(t3(n) == 3 * (std::int64_t{1} << n) - 2, "t3 G(" + std::to_string(n) + ")=" + std::to_string(t3(n)));
  }
  check(tz < 5, "z2 took " + std::to_string(tz) + "s");
  check(tt < 5, "t3 took " + std::to_string(tt) + "s");
  return check.out;
}

Outcome varopoulos() {
  Check check;
  struct Case {
    const char* family;
    int R;
  };
  std::ostringstream note;
  for (auto [fam, R] : {Case{"z2", 25}, {"z3", 12}, {"heisenberg", 10}, {"t3", 10}, {"tiling-4-5", 7}}) {
    const auto s = varopoulos_sweep(make_oracle(fam), R, 1000, 7);
    check(s.samples == 1000 && s.failures == 0,
          std::string(fam) + ": " + std::to_string(s.failures) + " failures");
    note << fam << " max ratio " << s.max_ratio << "  ";
  }
  if (check.out.ok) check.out.note = note.str();
  return check.out;
}

Outcome ubq_trichotomy() {
  Check check;
  auto wide = [](const char* fam, const char* dir, int sigma, int R, int D) {
    ProbeParams p;
    p.sigma = sigma;
    p.R = R;
    p.D = D;
    const auto r = ubq_probe(make_oracle(fam), dir, p);
    return r.certificate.certified() ? r.wide_count : -1;
  };
  const int z2 = wide("z2", "x", 1, 60, 20), z3 = wide("z3", "x", 2, 25, 10);
  const int t3 = wide("t3", "ray", 1, 12, 5), z1 = wide("z", "x", 1, 30, 10);
  check(z2 == 2, "z2 wide " + std::to_string(z2));
  check(z3 == 1, "z3 wide " + std::to_string(z3));
  check(t3 >= 3, "t3 wide " + std::to_string(t3));
  check(z1 == 0, "z wide " + std::to_string(z1));
  if (check.out.ok) {
    check.out.note = "wide: z2 " + std::to_string(z2) + ", z3 " + std::to_string(z3) + ", t3 " +
                     std::to_string(t3) + ", z " + std::to_string(z1);
  }
  return check.out;
}

Outcome quasi_circles() {
  Check check;
  struct Case {
    const char* family;
    int R, walk;
  };
  const Rational constants[][2] = {{1, 0}, {2, 0}, {3, 1}, {Rational(5, 2), 2}};
  for (auto [family, R, walk] : {Case{"z2", 40, 20}, Case{"z3", 30, 15}, Case{"heisenberg", 20, 10},
                                 Case{"t3", 16, 8}, Case{"tiling-4-5", 10, 5}}) {
    const auto ball = materialize_ball(make_oracle(family), R);
    std::mt19937_64 rng(11);
    std::vector<PathRecord> loops;
    for (const auto& qc : search_quasi_circles(ball, 3, 1, {4, 40, 200, 5})) {
      if (loops.size() < 30) loops.push_back(qc.loop);
    }
    while (loops.size() < 100) {
      auto loop = random_loop(ball, rng, walk);
      if (loop.length() <= 40) loops.push_back(loop);
    }
    for (std::size_t k = 0; k < loops.size(); ++k) {
      const auto& lc = constants[k % 4];
      const auto qc = certify_quasi_circle(ball, loops[k], lc[0], lc[1]);
      const std::string at = std::string(family) + " loop " + std::to_string(k);
      check(qc.cert.verdict != Verdict::Indeterminate, at + " indeterminate");
      check(qc.certified() == brute_force_quasi_circle(ball, loops[k], lc[0], lc[1]), at + " disagrees");
    }
  }
  const auto ball = materialize_ball(make_oracle("z2"), 50);
  for (int L = 2; L <= 20; ++L) {
    const auto sq = square_loop(L, {-L / 2, -L / 2});
    if (L >= 4) check(certify_quasi_circle(ball, sq, 2, 0).certified(), "square " + std::to_string(L) + " not (2,0)");
    check(!certify_quasi_circle(ball, sq, 1, 0).certified(), "square " + std::to_string(L) + " is (1,0)");
  }
  return check.out;
}

Outcome jurisdiction_trends() {
  Check check;
  const auto z2 = materialize_ball(make_oracle("z2"), 40);
  int prev = -1;
  std::ostringstream jurs;
  for (int L : {8, 12, 16, 20, 24}) {
    const int jur = jurisdiction(z2, square_loop(L, {-L / 2, -L / 2}), 1).jur;
    check(jur > prev, "Jur_1 at L=" + std::to_string(L) + " is " + std::to_string(jur));
    jurs << jur << ' ';
    prev = jur;
  }
  const auto tiling = materialize_ball(make_oracle("tiling-4-5"), 8);
  const auto rep = limited_jurisdiction_sweep(tiling, 2, 0, 2, {{4, 10}, {11, 20}, {21, 30}, {31, 40}},
                                              {4, 40, 400, 1});
  check(rep.trend == JurisdictionTrend::BoundedSoFar, std::string("{4,5} trend ") + to_string(rep.trend));
  if (check.out.ok) {
    int found = 0;
    for (const auto& b : rep.buckets) found += b.count;
    check.out.note = "z2 Jur_1 " + jurs.str() + "; {4,5} " + std::to_string(found) + " loops, bounded-so-far";
  }
  return check.out;
}

Outcome cross_examiner_suite() {
  Check check;
  const auto ball = materialize_ball(make_oracle("z2"), 80);
  const auto ce = construct_ce_z2();
  check(validate_cross_examiner(ball, ce).all_pass(), "canonical fails");
  const auto ms = ce_mutations(80);
  check(ms.size() == 30, "suite has " + std::to_string(ms.size()) + " cases");
  for (const auto& m : ms) {
    auto bad = ce;
    m.apply(bad);
    check(validate_cross_examiner(ball, bad).failed() == std::vector<int>{m.axiom},
          std::string(m.name) + " does not fail exactly CE" + std::to_string(m.axiom));
  }
  for (int i = 0; i < 3; ++i) {
    check(certify_quasi_geodesic(ball, ce.rho(i), Rational(1), Rational(0)).certified(), "rho not (1,0)");
    check(certify_quasi_geodesic(ball, ce.rho(i), Rational(4), Rational(0)).certified(), "rho not (4,0)");
  }
  return check.out;
}

Outcome good_subpaths() {
  Check check;
  const auto rep = exhaustive_good_subpath_check(12);
  check(rep.counterexamples == 0, std::to_string(rep.counterexamples) + " counterexamples");
  // Independent enumeration against the brute-force window search.
  const auto g = alternating_cycle();
  long long n = 0, brute_misses = 0;
  DeltaPath dp{0};
  std::function<void()> go = [&] {
    if (dp.back() == 1 && std::find(dp.begin(), dp.end(), 2) != dp.end()) {
      ++n;
      brute_misses += !brute_good_subpath_exists(dp);
    }
    if (dp.size() == 13) return;
    for (int next = 0; next < 6; ++next) {
      if (!g.adjacent(dp.back(), next)) continue;
      dp.push_back(next);
      go();
      dp.pop_back();
    }
  };
  go();
  check(n == rep.paths, "enumerations disagree: " + std::to_string(n) + " vs " + std::to_string(rep.paths));
  check(brute_misses == 0, std::to_string(brute_misses) + " paths without a window");
  if (check.out.ok) check.out.note = std::to_string(rep.paths) + " paths";
  return check.out;
}

Outcome witness_protection() {
  Check check;
  const auto o = make_oracle("z2");
  {
    const auto ball = materialize_ball(o, 40);
    const auto rho1 = axis_segment(o, "x", 40);
    const auto found = find_witness_pair(ball, rho1, 1, 13);
    check(found.pair.has_value(), "no witness pair on the axis");
    if (!found.pair) return check.out;
    const auto detour = polyline({{-40, 0}, {-5, 0}, {-5, 5}, {5, 5}, {5, 0}, {40, 0}});
    check(witness_protection_demo(ball, rho1, detour, *found.pair, 1, 5).preserved, "height-5 detour");
    std::vector<std::pair<int, int>> xy;
    for (int x = -37; x <= 37; ++x) xy.push_back({x, 3});
    check(witness_protection_demo(ball, rho1, pts(xy), *found.pair, 1, 6).preserved, "(0,3) shift");
  }
  const auto ball = materialize_ball(o, 70);
  const auto rho = axis_segment(o, "x", 70);
  const auto pair = *find_witness_pair(ball, rho, 1, 20).pair;
  const auto p = polyline({{0, 2}, {0, -2}});
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 50; ++k) {
    const auto rep = chord_witness_check(ball, rho, pair, p, ragged_detour(rng), 1);
    check(rep.hypotheses_hold(), "scenario " + std::to_string(k) + " invalid: " + rep.detail);
    check(rep.w1_meets || rep.w2_meets, "scenario " + std::to_string(k) + " meets neither");
  }
  return check.out;
}

Outcome derived_constants_check() {
  Check check;
  std::mt19937_64 rng(17);
  for (int k = 0; k < 50; ++k) {
    const std::int64_t b = 1 + rng() % 30, a = b + rng() % 60;
    const std::int64_t f = 1 + rng() % 30, e = rng() % 60;
    const auto K = derived_constants(Rational(a, b), Rational(e, f));
    const std::string at = std::to_string(a) + "/" + std::to_string(b) + "," + std::to_string(e) + "/" + std::to_string(f);
    check(K.lambda_prime * Rational(b * b * b) == Rational(48 * a * a * a), "lambda' at " + at);
    check(K.c_prime * Rational(f) == Rational(2 * e), "c' at " + at);
    check(K.K1 * Rational(b * b * f) == Rational(21 * a * a * (f + e)), "K1 at " + at);
  }
  const auto ball = materialize_ball(make_oracle("z2"), 64);
  const Rational lambdas[] = {1, Rational(3, 2), 2, Rational(5, 2), 3};
  int n = 0;
  for (const auto& lambda : lambdas) {
    for (int d : {2, 4, 6, 8}) {
      const Rational c(static_cast<std::int64_t>(rng() % 3));
      const int t = boost::rational_cast<int>(2 * lambda * d);
      const auto q = z2_quad(t, t, d);
      const auto rep = quadrilateral_circle_check(ball, q.g1, q.g2, q.p1, q.p2, q.alpha, lambda, c);
      const std::string at = "lambda " + to_string(lambda) + " d " + std::to_string(d);
      check(rep.passes(), at + ": " + rep.violated_claim.value_or("circle not certified"));
      check(rep.measured.lambda_at_c && *rep.measured.lambda_at_c <= rep.constants.lambda_prime, at + " measured lambda");
      check(rep.measured.c_at_lambda <= rep.constants.c_prime, at + " measured c");
      ++n;
    }
  }
  check(n == 20, "ran " + std::to_string(n) + " instances");
  return check.out;
}

Outcome classification() {
  Check check;
  const std::pair<const char*, Label> expect[] = {{"z2", Label::EuclideanPlaneLike},
                                                  {"tiling-4-5", Label::HyperbolicPlaneLike},
                                                  {"z3", Label::UbqFails},
                                                  {"t3", Label::UbqFails},
                                                  {"z", Label::UbqFails}};
  std::ostringstream note;
  for (auto [fam, label] : expect) {
    const auto a = classify(fam), b = classify(fam);
    check(a.label == label, std::string(fam) + " -> " + to_string(a.label) + " (" + a.reason + ")");
    check(to_json(a).dump() == to_json(b).dump(), std::string(fam) + " evidence not deterministic");
    note << fam << ' ' << to_string(a.label) << "  ";
  }
  if (check.out.ok) check.out.note = note.str();
  return check.out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "growth exactness", 10, growth_exactness},
      {2, "isoperimetric inequality", 60, varopoulos},
      {3, "UBQ trichotomy probes", 30, ubq_trichotomy},
      {4, "quasi-circle certification", 60, quasi_circles},
      {5, "jurisdiction trends", 120, jurisdiction_trends},
      {6, "cross-examiner suite", 20, cross_examiner_suite},
      {7, "good subpaths of delta-paths", 30, good_subpaths},
      {8, "witness protection and chords", 30, witness_protection},
      {9, "derived constants", 30, derived_constants_check},
      {10, "classification pipeline", 300, classification},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= c.limit_s) {
      out.ok = false;
      out.note += (out.note.empty() ? "" : "; ") + std::string("over the time limit");
    }
    failed += !out.ok;
    std::printf("%s %2d %-32s %7.2fs / %4.0fs  %s\n", out.ok ? "PASS" : "FAIL", c.id, c.name, secs,
                c.limit_s, out.note.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed;
}
