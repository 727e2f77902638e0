#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "growth.hpp"
#include "separation.hpp"

namespace coarse {

// A stretch of a loop: `length` edges forward from position `start`.
struct CyclicSubpath {
  int start = 0;
  int length = 0;
};

struct QuasiCircle {
  PathRecord loop;
  Rational lambda{1}, c{0};
  QGCertificate cert;
  // Subpath carrying the worst pair when the certificate is not clean.
  std::optional<CyclicSubpath> violation;

  [[nodiscard]] bool certified() const { return cert.certified(); }
  [[nodiscard]] int length() const { return loop.length(); }
};

namespace detail {

inline std::vector<VertexKey> loop_positions(const PathRecord& loop) {
  if (loop.vertices.size() < 2 || loop.front() != loop.back()) {
    throw PreconditionError("malformed loop: first and last vertex differ");
  }
  return {loop.vertices.begin(), loop.vertices.end() - 1};
}

inline int cyclic_gap(int n, int s, int t) { return std::min(t - s, n - (t - s)); }

inline CyclicSubpath subpath_of_pair(int n, int s, int t) {
  if (t - s <= n - (t - s)) return {s, t - s};
  return {t, n - (t - s)};
}

}  // namespace detail

// Every subpath of length <= len/2 must be a (lambda,c)-quasi-geodesic. That
// is the same as dist >= gap/lambda - c for every pair of positions, with gap
// measured the short way round.
inline QuasiCircle certify_quasi_circle(const Ball& ball, const PathRecord& loop,
                                        const Rational& lambda, const Rational& c) {
  auto pos = detail::loop_positions(loop);
  const int n = static_cast<int>(pos.size());
  QuasiCircle qc;
  qc.loop = loop.is_loop() ? loop : as_loop(loop);
  qc.lambda = lambda;
  qc.c = c;
  qc.cert = detail::certify_pairs(ball, pos, lambda, c, n / 2,
                                  [n](int s, int t) { return detail::cyclic_gap(n, s, t); });
  if (qc.cert.offending) {
    qc.violation = detail::subpath_of_pair(n, qc.cert.offending->i, qc.cert.offending->j);
  }
  return qc;
}

// Tightest constants a path or loop passes with, one parameter held fixed.
struct MeasuredConstants {
  std::optional<Rational> lambda_at_c;  // empty: no lambda works at that c
  Rational c_at_lambda{0};
  bool exact = true;
};

namespace detail {

template <class GapOf>
MeasuredConstants measure_constants(const Ball& ball, const std::vector<VertexKey>& verts,
                                    const Rational& c_fixed, const Rational& lambda_fixed,
                                    GapOf gap_of) {
  MeasuredConstants m;
  Rational best_lambda{1}, best_c{0};
  bool lambda_ok = true;
  const int n = static_cast<int>(verts.size());
  const auto& oracle = *ball.oracle();
  std::vector<int> idx;
  for (const auto& v : verts) idx.push_back(ball.at(v));
  for (int s = 0; s < n; ++s) {
    std::vector<int> bfs;
    if (!oracle.exact_distance(verts[s], verts[s])) bfs = ball.bfs_from(idx[s]);
    for (int t = s + 1; t < n; ++t) {
      const int gap = gap_of(s, t);
      std::int64_t d;
      if (bfs.empty()) {
        d = *oracle.exact_distance(verts[s], verts[t]);
      } else {
        d = bfs[idx[t]];
        m.exact = m.exact && half_perimeter_exact(ball.radius(), ball.depth(idx[s]),
                                                  ball.depth(idx[t]), d);
      }
      if (gap == 0) continue;
      const Rational denom = Rational(d) + c_fixed;
      if (denom <= 0) {
        lambda_ok = false;
      } else {
        best_lambda = std::max(best_lambda, Rational(gap) / denom);
      }
      best_c = std::max(best_c, Rational(gap) / lambda_fixed - d);
    }
  }
  if (lambda_ok) m.lambda_at_c = best_lambda;
  m.c_at_lambda = best_c;
  return m;
}

}  // namespace detail

inline MeasuredConstants measure_loop_constants(const Ball& ball, const PathRecord& loop,
                                                const Rational& c_fixed,
                                                const Rational& lambda_fixed) {
  auto pos = detail::loop_positions(loop);
  const int n = static_cast<int>(pos.size());
  return detail::measure_constants(ball, pos, c_fixed, lambda_fixed,
                                   [n](int s, int t) { return detail::cyclic_gap(n, s, t); });
}

// Axis-parallel square loop in Z^2 with corner at `origin`, counterclockwise.
inline PathRecord square_loop(int L, VertexKey origin = {0, 0}) {
  if (L < 1) throw PreconditionError("square side must be >= 1");
  std::vector<VertexKey> v;
  const int x0 = origin[0], y0 = origin[1];
  for (int t = 0; t < L; ++t) v.push_back({x0 + t, y0});
  for (int t = 0; t < L; ++t) v.push_back({x0 + L, y0 + t});
  for (int t = 0; t < L; ++t) v.push_back({x0 + L - t, y0 + L});
  for (int t = 0; t <= L; ++t) v.push_back({x0, y0 + L - t});
  return PathRecord(std::move(v), PathRecord::Kind::Loop);
}

struct SearchParams {
  int min_length = 4;
  int max_length = 40;
  int attempts = 200;
  std::uint64_t seed = 1;
};

namespace detail {

// Shortest path from u to v through allowed vertices, least key first.
inline std::optional<std::vector<int>> shortest_within(const Ball& ball, int u, int v,
                                                       const std::vector<char>& allowed) {
  const int src[] = {v};
  auto d = ball.bfs(src, std::numeric_limits<int>::max(), &allowed);
  if (d[u] == kUnreached) return std::nullopt;
  std::vector<int> path{u};
  while (path.back() != v) {
    int best = -1;
    for (int w : ball.neighbors(path.back())) {
      if (d[w] == d[path.back()] - 1 && (best < 0 || ball.key(w) < ball.key(best))) best = w;
    }
    path.push_back(best);
  }
  return path;
}

}  // namespace detail

namespace detail {

enum class Tie { Least, Greatest, Random };

// Geodesic from u to v down the distance field to_v, ties broken per `tie`.
inline std::vector<int> tie_broken_geodesic(const Ball& ball, int u, const std::vector<int>& to_v,
                                            Tie tie, std::mt19937_64& rng) {
  std::vector<int> path{u}, options;
  while (to_v[path.back()] > 0) {
    options.clear();
    for (int w : ball.neighbors(path.back())) {
      if (to_v[w] == to_v[path.back()] - 1) options.push_back(w);
    }
    if (tie == Tie::Random) {
      path.push_back(options[rng() % options.size()]);
      continue;
    }
    auto less = [&](int a, int b) { return ball.key(a) < ball.key(b); };
    path.push_back(tie == Tie::Least ? *std::min_element(options.begin(), options.end(), less)
                                     : *std::max_element(options.begin(), options.end(), less));
  }
  return path;
}

// First stretch where two paths with common ends part and meet again, as a
// loop. Both paths must be geodesics between the same ends.
inline std::optional<std::vector<int>> first_lens(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t split = 0;
  while (split + 1 < a.size() && a[split + 1] == b[split + 1]) ++split;
  if (split + 1 >= a.size()) return std::nullopt;
  // Geodesics through a common vertex reach it at the same parameter.
  std::size_t join = split + 1;
  while (join < a.size() && a[join] != b[join]) ++join;
  std::vector<int> loop(a.begin() + split, a.begin() + join + 1);
  for (std::size_t t = join; t-- > split;) loop.push_back(b[t]);
  return loop;
}

}  // namespace detail

// Randomized, seeded search alternating two generators: the lens between a
// least-key geodesic and a greatest-key or randomly tie-broken one, and a geodesic closed up
// by a second shortest path kept k away from its middle. Returns the
// certified loops in discovery order, without repeats.
inline std::vector<QuasiCircle> search_quasi_circles(const Ball& ball, const Rational& lambda,
                                                     const Rational& c,
                                                     const SearchParams& params) {
  if (params.attempts <= 0) throw PreconditionError("search budget must be positive");
  detail::check_constants(lambda, c);
  std::mt19937_64 rng(params.seed);
  const int half = ball.radius() / 2;
  std::vector<int> inner;
  for (int v = 0; v < ball.size(); ++v) {
    if (ball.depth(v) <= half) inner.push_back(v);
  }
  std::vector<QuasiCircle> found;
  std::set<std::vector<int>> seen;
  for (int attempt = 0; attempt < params.attempts; ++attempt) {
    const bool lens = attempt % 2 == 0;
    const int u = inner[rng() % inner.size()];
    const auto du = ball.bfs_from(u);
    // A lens between ends at distance r has length at most 2r.
    std::vector<int> targets;
    for (int v : inner) {
      if (du[v] >= 1 && 2 * du[v] >= params.min_length && du[v] <= params.max_length) {
        targets.push_back(v);
      }
    }
    if (targets.empty()) continue;
    const int v = targets[rng() % targets.size()];
    const auto to_v = ball.bfs_from(v);
    const auto first = detail::tie_broken_geodesic(ball, u, to_v, detail::Tie::Least, rng);
    std::vector<int> cycle;
    if (lens) {
      const auto tie = attempt % 4 == 0 ? detail::Tie::Greatest : detail::Tie::Random;
      auto other = detail::tie_broken_geodesic(ball, u, to_v, tie, rng);
      auto l = detail::first_lens(first, other);
      if (!l) continue;
      cycle = std::move(*l);
    } else {
      const int len = static_cast<int>(first.size()) - 1;
      const int k = 1 + static_cast<int>(rng() % std::max(1, len / 3));
      if (len < 2 * k + 2) continue;
      std::vector<int> core(first.begin() + k + 1, first.end() - k - 1);
      auto allowed = detail::neighborhood_mask(ball, core, k);
      for (auto& a : allowed) a = !a;
      for (int t = 1; t < len; ++t) allowed[first[t]] = 0;
      auto second = detail::shortest_within(ball, u, v, allowed);
      if (!second) continue;
      cycle = first;
      cycle.insert(cycle.end(), second->rbegin() + 1, second->rend());
    }
    const int length = static_cast<int>(cycle.size()) - 1;
    if (length < params.min_length || length > params.max_length) continue;
    std::vector<int> key(cycle.begin(), cycle.end() - 1);
    std::sort(key.begin(), key.end());
    if (!seen.insert(key).second) continue;
    std::vector<VertexKey> verts;
    for (int i : cycle) verts.push_back(ball.key(i));
    auto qc = certify_quasi_circle(ball, PathRecord(std::move(verts), PathRecord::Kind::Loop), lambda, c);
    if (qc.certified()) found.push_back(std::move(qc));
  }
  return found;
}

struct DepthWitness {
  int depth = 0;
  int vertex = -1;  // ball index realising the depth
};

// depth(A) = max over A of dist(v, dA), by multi-source BFS from dA.
inline DepthWitness depth_witness(const Ball& ball, const std::vector<int>& A) {
  if (A.empty()) throw PreconditionError("depth of an empty set");
  std::vector<char> in(ball.size(), 0);
  for (int v : A) {
    if (ball.on_boundary(v)) {
      std::ostringstream os;
      os << "set is not enclosed: " << ball.key(v) << " lies on the ball boundary";
      throw PreconditionError(os.str());
    }
    in[v] = 1;
  }
  std::vector<int> boundary;
  for (int v : A) {
    for (int w : ball.neighbors(v)) {
      if (!in[w]) boundary.push_back(w);
    }
  }
  std::sort(boundary.begin(), boundary.end());
  boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
  const auto d = ball.bfs(boundary, std::numeric_limits<int>::max(), &in);
  DepthWitness w;
  for (int v : A) {
    if (d[v] > w.depth || (d[v] == w.depth && (w.vertex < 0 || ball.key(v) < ball.key(w.vertex)))) {
      w.depth = d[v];
      w.vertex = v;
    }
  }
  return w;
}

inline int depth(const Ball& ball, const std::vector<int>& A) { return depth_witness(ball, A).depth; }

struct EnclosedComponent {
  ComponentReport component;
  int depth = 0;
  VertexKey deepest;
};

struct JurisdictionReport {
  int delta = 0;
  std::vector<EnclosedComponent> enclosed;
  std::vector<ComponentReport> open;
  int jur = 0;
};

// Jur_delta(S): largest depth among the enclosed components of
// ball \ N_delta(S). Components reaching the rim are listed but not counted.
inline JurisdictionReport jurisdiction(const Ball& ball, const std::vector<int>& S, int delta) {
  if (delta < 0) throw PreconditionError("delta must be >= 0");
  auto dec = complement_components(ball, S, delta, 0);
  JurisdictionReport rep;
  rep.delta = delta;
  // dA of each component lies in N_delta(S), so one BFS from the whole
  // neighbourhood through the complement gives every dist(v, dA).
  std::vector<int> sources;
  std::vector<char> outside(ball.size(), 0);
  for (int v = 0; v < ball.size(); ++v) {
    if (dec.in_neighborhood(v)) {
      sources.push_back(v);
    } else {
      outside[v] = 1;
    }
  }
  const auto d = ball.bfs(sources, std::numeric_limits<int>::max(), &outside);
  std::vector<EnclosedComponent> by_id(dec.components.size());
  for (const auto& comp : dec.components) by_id[comp.id].component = comp;
  std::vector<int> deepest(dec.components.size(), -1);
  for (int v = 0; v < ball.size(); ++v) {
    const int c = dec.component[v];
    if (c < 0) continue;
    auto& e = by_id[c];
    if (deepest[c] < 0 || d[v] > e.depth || (d[v] == e.depth && ball.key(v) < ball.key(deepest[c]))) {
      e.depth = d[v];
      deepest[c] = v;
    }
  }
  for (std::size_t c = 0; c < by_id.size(); ++c) {
    if (by_id[c].component.enclosed()) {
      by_id[c].deepest = ball.key(deepest[c]);
      rep.jur = std::max(rep.jur, by_id[c].depth);
      rep.enclosed.push_back(by_id[c]);
    } else {
      rep.open.push_back(by_id[c].component);
    }
  }
  return rep;
}

inline JurisdictionReport jurisdiction(const Ball& ball, const PathRecord& S, int delta) {
  return jurisdiction(ball, detail::unique_indices(ball, S.vertices), delta);
}

enum class JurisdictionTrend { BoundedSoFar, Growing, Vacuous };

inline const char* to_string(JurisdictionTrend t) {
  switch (t) {
    case JurisdictionTrend::BoundedSoFar: return "bounded-so-far";
    case JurisdictionTrend::Growing: return "growing";
    case JurisdictionTrend::Vacuous: return "vacuous";
  }
  return "unknown";
}

struct SweepBucket {
  int lo = 0, hi = 0;  // loop lengths in [lo, hi]
  int count = 0;
  int max_jur = 0;
  int longest = 0;
};

struct SweepReport {
  std::string family;
  Rational lambda{1}, c{0};
  int delta = 0;
  int R = 0;
  std::vector<SweepBucket> buckets;
  JurisdictionTrend trend = JurisdictionTrend::Vacuous;

  [[nodiscard]] std::string csv() const {
    std::ostringstream os;
    os << "bucket,count,max_jur\n";
    for (const auto& b : buckets) os << b.lo << '-' << b.hi << ',' << b.count << ',' << b.max_jur << '\n';
    return os.str();
  }
};

// Growing iff the last nonempty bucket's max jurisdiction is at least twice
// the first's and at least 4 more.
inline JurisdictionTrend classify_trend(const std::vector<SweepBucket>& buckets) {
  const SweepBucket* first = nullptr;
  const SweepBucket* last = nullptr;
  for (const auto& b : buckets) {
    if (b.count == 0) continue;
    if (!first) first = &b;
    last = &b;
  }
  if (!first) return JurisdictionTrend::Vacuous;
  const bool growing = last->max_jur >= 2 * first->max_jur && last->max_jur >= first->max_jur + 4;
  return growing ? JurisdictionTrend::Growing : JurisdictionTrend::BoundedSoFar;
}

inline SweepReport limited_jurisdiction_sweep(const Ball& ball, const Rational& lambda,
                                              const Rational& c, int delta,
                                              const std::vector<std::pair<int, int>>& buckets,
                                              SearchParams params) {
  if (buckets.empty()) throw PreconditionError("sweep needs at least one length bucket");
  SweepReport rep;
  rep.family = ball.oracle()->name();
  rep.lambda = lambda;
  rep.c = c;
  rep.delta = delta;
  rep.R = ball.radius();
  params.min_length = buckets.front().first;
  params.max_length = buckets.front().second;
  for (const auto& [lo, hi] : buckets) {
    params.min_length = std::min(params.min_length, lo);
    params.max_length = std::max(params.max_length, hi);
    rep.buckets.push_back({lo, hi, 0, 0, 0});
  }
  for (const auto& qc : search_quasi_circles(ball, lambda, c, params)) {
    const int jur = jurisdiction(ball, qc.loop, delta).jur;
    for (auto& b : rep.buckets) {
      if (qc.length() < b.lo || qc.length() > b.hi) continue;
      ++b.count;
      b.max_jur = std::max(b.max_jur, jur);
      b.longest = std::max(b.longest, qc.length());
    }
  }
  rep.trend = classify_trend(rep.buckets);
  return rep;
}

struct DerivedConstants {
  Rational lambda{1}, c{0}, delta{0};
  Rational lambda_prime{48}, c_prime{0};
  Rational K1{21}, K2{1};

  // Admissible range for t_i given d.
  [[nodiscard]] std::pair<Rational, Rational> t_window(const Rational& d) const {
    return {2 * lambda / (2 * lambda + 1) * d, 2 * lambda * d};
  }
};

inline DerivedConstants derived_constants(const Rational& lambda, const Rational& c,
                                          const Rational& delta = Rational(0)) {
  detail::check_constants(lambda, c);
  DerivedConstants k;
  k.lambda = lambda;
  k.c = c;
  k.delta = delta;
  k.lambda_prime = 48 * lambda * lambda * lambda;
  k.c_prime = 2 * c;
  k.K1 = 21 * lambda * lambda * (1 + c);
  k.K2 = std::max(Rational(1), delta);
  return k;
}

struct QuadrilateralReport {
  std::optional<std::string> violated_claim;
  std::string detail;
  int d = 0;  // dist(v0, alpha)
  int t1 = 0, t2 = 0;
  DerivedConstants constants;
  std::optional<QuasiCircle> circle;  // Q at (lambda', c')
  MeasuredConstants measured;         // lambda at c', c at lambda'

  [[nodiscard]] bool passes() const { return !violated_claim && circle && circle->certified(); }
};

// Q = gamma2'^-1 . gamma1' . p1 . alpha . p2^-1 with both gammas starting at
// v0. The other face of the truncated circle is not materialized, so alpha
// stands in for it in the distance claims.
inline QuadrilateralReport quadrilateral_circle_check(const Ball& ball, const PathRecord& gamma1,
                                                      const PathRecord& gamma2,
                                                      const PathRecord& p1, const PathRecord& p2,
                                                      const PathRecord& alpha,
                                                      const Rational& lambda, const Rational& c) {
  QuadrilateralReport rep;
  rep.constants = derived_constants(lambda, c);
  auto fail = [&](std::string claim, std::string why) {
    rep.violated_claim = std::move(claim);
    rep.detail = std::move(why);
    return rep;
  };
  for (const auto* piece : {&gamma1, &gamma2, &p1, &p2, &alpha}) check_path(*ball.oracle(), *piece);
  if (gamma1.front() != gamma2.front() || gamma1.back() != p1.front() ||
      p1.back() != alpha.front() || alpha.back() != p2.back() || p2.front() != gamma2.back()) {
    return fail("pieces chain into a loop", "endpoints do not match up");
  }
  const auto axis = concat(gamma2.reversed(), gamma1);
  if (!certify_quasi_geodesic(ball, axis, lambda, c)) {
    return fail("gamma2'^-1 . gamma1' is a (lambda,c)-quasi-geodesic", "certificate not clean");
  }
  if (!certify_quasi_geodesic(ball, alpha, lambda, c)) {
    return fail("alpha is a (lambda,c)-quasi-geodesic", "certificate not clean");
  }
  const auto from_v0 = ball.bfs_from(ball.at(gamma1.front()));
  auto dist_to = [&](const std::vector<int>& dists, const PathRecord& path) {
    int best = std::numeric_limits<int>::max();
    for (const auto& v : path.vertices) best = std::min(best, dists[ball.at(v)]);
    return best;
  };
  rep.d = dist_to(from_v0, alpha);
  rep.t1 = gamma1.length();
  rep.t2 = gamma2.length();
  const Rational d(rep.d);
  const auto [lo, hi] = rep.constants.t_window(d);
  for (int t : {rep.t1, rep.t2}) {
    if (Rational(t) < lo || Rational(t) > hi) {
      return fail("2 lambda/(2 lambda+1) d <= t_i <= 2 lambda d",
                  "t = " + std::to_string(t) + " outside [" + to_string(lo) + ", " + to_string(hi) + "]");
    }
  }
  if (2 * lambda * p1.length() > rep.t1 || 2 * lambda * p2.length() > rep.t2) {
    return fail("2 lambda length(p_i) <= t_i", "a drop p_i is too long for its t_i");
  }
  const auto from_p1 = ball.bfs(detail::unique_indices(ball, p1.vertices));
  if (Rational(dist_to(from_p1, p2)) < 2 * d / (2 * lambda + 1) - c) {
    return fail("dist(p_1, p_2) >= 2d/(2 lambda+1) - c", "drops too close");
  }
  const auto from_alpha = ball.bfs(detail::unique_indices(ball, alpha.vertices));
  for (const auto* g : {&gamma1, &gamma2}) {
    if (Rational(dist_to(from_alpha, *g)) <= d / (2 * lambda + 1)) {
      return fail("dist(gamma_i', T) > d/(2 lambda+1)", "a ray segment runs too close to alpha");
    }
  }
  auto Q = concat(concat(concat(axis, p1), alpha), p2.reversed());
  rep.circle = certify_quasi_circle(ball, as_loop(Q), rep.constants.lambda_prime, rep.constants.c_prime);
  rep.measured = measure_loop_constants(ball, as_loop(Q), rep.constants.c_prime, rep.constants.lambda_prime);
  return rep;
}

enum class EnclosureVerdict { Enclosed, NotEnclosed, Vacuous, HypothesisFailure };

inline const char* to_string(EnclosureVerdict v) {
  switch (v) {
    case EnclosureVerdict::Enclosed: return "enclosed";
    case EnclosureVerdict::NotEnclosed: return "not-enclosed";
    case EnclosureVerdict::Vacuous: return "vacuous";
    case EnclosureVerdict::HypothesisFailure: return "hypothesis-failure";
  }
  return "unknown";
}

struct EnclosureReport {
  EnclosureVerdict verdict = EnclosureVerdict::HypothesisFailure;
  std::optional<int> violated_clause;
  std::string detail;
  PathRecord ell;
  std::optional<ComponentReport> component;  // component of w1(0)
};

// Nine-clause scenario: rho, witnesses, p, nested chords q1 and q2, and the
// loop ell = s^-1 . q2 with s the stretch of rho between q2's ends. The
// verdict says whether the component of w1(0) in ball \ N_sigma(ell) is
// enclosed.
inline EnclosureReport loop_enclosure_scenario(const Ball& ball, const PathRecord& rho,
                                               const WitnessPair& pair, const PathRecord& p,
                                               const PathRecord& q1, const PathRecord& q2,
                                               int sigma, int D = -1) {
  if (D < 0) D = ball.radius() / 3;
  EnclosureReport rep;
  auto fail = [&](int clause, std::string why) {
    rep.verdict = EnclosureVerdict::HypothesisFailure;
    rep.violated_clause = clause;
    rep.detail = std::move(why);
    return rep;
  };
  {
    std::set<VertexKey> on_rho(rho.vertices.begin(), rho.vertices.end());
    if (std::all_of(q2.vertices.begin(), q2.vertices.end(),
                    [&](const VertexKey& v) { return on_rho.count(v) != 0; })) {
      rep.verdict = EnclosureVerdict::Vacuous;
      rep.detail = "q2 runs along rho: the loop collapses and encloses nothing";
      return rep;
    }
  }
  auto a = detail::audit_rho_and_p(ball, rho, pair, p, sigma, D);
  if (a.violated_clause) return fail(*a.violated_clause, a.detail);
  const auto& oracle = *ball.oracle();
  const auto near_w2 =
      detail::neighborhood_mask(ball, detail::unique_indices(ball, pair.w2.vertices), sigma);
  auto chord_ok = [&](int clause, const PathRecord& q, const std::vector<char>& avoid,
                      const char* avoid_name) -> bool {
    std::string why;
    if (!detail::walks(oracle, q, why)) {
      fail(clause, why);
      return false;
    }
    const int e1 = detail::piece_of(rho, q.front(), a.plus_end, a.minus_start);
    const int e2 = detail::piece_of(rho, q.back(), a.plus_end, a.minus_start);
    if (e1 == 0 || e2 == 0 || e1 == e2) {
      fail(clause, "chord does not join the two end pieces of rho \\ K");
      return false;
    }
    for (const auto* mask : {&avoid, &near_w2}) {
      if (auto hit = detail::first_in(ball, q, *mask)) {
        std::ostringstream os;
        os << "chord meets " << (mask == &avoid ? avoid_name : "N_sigma(w2)") << " at " << *hit;
        fail(clause, os.str());
        return false;
      }
    }
    return true;
  };
  // 6: q1 joins the pieces, avoids K and N_sigma(w2).
  if (!chord_ok(6, q1, a.K, "K")) return rep;
  // 7: rho \ N_10sigma(q1) has two end pieces.
  const auto K2 = detail::neighborhood_mask(ball, detail::unique_indices(ball, q1.vertices), 10 * sigma);
  auto [pe2, ms2] = detail::end_pieces(ball, rho, K2);
  if (pe2 < 0 || ms2 > rho.length() || pe2 >= ms2) {
    return fail(7, "rho \\ N_10sigma(q1) does not split into two end pieces");
  }
  // 8: q2 joins the pieces of rho \ K, avoids K' and N_sigma(w2).
  if (!chord_ok(8, q2, K2, "K'")) return rep;
  // 9: s on rho between the ends of q2; ell = s^-1 . q2.
  int ia = -1, ib = -1;
  for (int t = 0; t <= rho.length(); ++t) {
    if (rho[t] == q2.front()) ia = t;
    if (rho[t] == q2.back()) ib = t;
  }
  const auto s = ia <= ib ? rho.slice(ia, ib) : rho.slice(ib, ia).reversed();
  rep.ell = as_loop(concat(s.reversed(), q2));
  auto dec = complement_components(ball, rep.ell, sigma, 0);
  const int w0 = ball.at(pair.w1.front());
  if (dec.in_neighborhood(w0)) {
    rep.verdict = EnclosureVerdict::Vacuous;
    rep.detail = "w1(0) lies within sigma of ell";
    return rep;
  }
  rep.component = dec.components[dec.component[w0]];
  rep.verdict = rep.component->enclosed() ? EnclosureVerdict::Enclosed : EnclosureVerdict::NotEnclosed;
  return rep;
}

struct TruncatedQuasiCircle {
  PathRecord major;      // F
  PathRecord minor;      // f
  PathRecord extension;  // F', so that F . F' is the circle f truncates
  Rational lambda{1}, c{0};
  QGCertificate minor_cert;   // f as a (lambda,c)-quasi-geodesic
  QuasiCircle extended;       // F . F' as a (lambda,c)-quasi-circle
  QuasiCircle loop;           // T = F . f itself

  [[nodiscard]] bool certified() const {
    return minor_cert.certified() && extended.certified() && loop.certified();
  }
};

struct ExtractionLog {
  std::vector<std::string> lines;
};

// Cuts a run of the loop that stays off N_sigma(rho) and lands near both far
// ends of rho, pulls its ends onto rho with short geodesics, and closes it
// along rho. The loop must agree with rho inside the exclusion ball around
// rho's midpoint. Constants are (lambda, c + 5 sigma + 5).
inline TruncatedQuasiCircle chord_extraction(const Ball& ball, const PathRecord& rho,
                                             const QuasiCircle& circle, int sigma,
                                             int exclusion_radius) {
  ExtractionLog log;
  auto failure = [&](const std::string& why) {
    std::ostringstream os;
    os << "extraction failure: " << why;
    for (const auto& l : log.lines) os << "\n  " << l;
    return PreconditionError(os.str());
  };
  auto pos = detail::loop_positions(circle.loop);
  const int n = static_cast<int>(pos.size());
  const int u = ball.at(rho[rho.length() / 2]);
  const auto from_u = ball.bfs_from(u);
  std::set<VertexKey> on_rho(rho.vertices.begin(), rho.vertices.end());
  std::set<VertexKey> on_loop(pos.begin(), pos.end());
  if (std::all_of(pos.begin(), pos.end(),
                  [&](const VertexKey& v) { return from_u[ball.at(v)] <= exclusion_radius; })) {
    throw failure("loop never leaves the exclusion ball");
  }
  for (const auto& v : pos) {
    if (from_u[ball.at(v)] <= exclusion_radius && !on_rho.count(v)) {
      std::ostringstream os;
      os << "loop leaves rho inside the exclusion ball at " << v;
      throw PreconditionError(os.str());
    }
  }
  for (const auto& v : rho.vertices) {
    if (from_u[ball.at(v)] <= exclusion_radius && !on_loop.count(v)) {
      throw PreconditionError("loop does not follow rho inside the exclusion ball");
    }
  }
  // rho_+ and rho_-: the end pieces outside the exclusion ball.
  std::vector<char> B(ball.size(), 0);
  for (int v = 0; v < ball.size(); ++v) B[v] = from_u[v] <= exclusion_radius;
  auto [plus_end, minus_start] = detail::end_pieces(ball, rho, B);
  if (plus_end < 0 || minus_start > rho.length()) {
    throw failure("rho does not leave the exclusion ball at both ends");
  }
  const auto near_rho = detail::neighborhood_mask(ball, detail::unique_indices(ball, rho.vertices), sigma);
  std::vector<int> plus_idx, minus_idx;
  for (int t = 0; t <= plus_end; ++t) plus_idx.push_back(ball.at(rho[t]));
  for (int t = minus_start; t <= rho.length(); ++t) minus_idx.push_back(ball.at(rho[t]));
  const auto to_plus = ball.bfs(plus_idx), to_minus = ball.bfs(minus_idx);

  // Maximal cyclic runs of loop positions off N_sigma(rho).
  int anchor = -1;
  for (int i = 0; i < n; ++i) {
    if (near_rho[ball.at(pos[i])]) {
      anchor = i;
      break;
    }
  }
  if (anchor < 0) throw failure("loop never comes within sigma of rho");
  std::optional<std::pair<int, int>> run;  // (start, length) cyclic
  bool swapped = false;
  for (int k = 1; k <= n && !run; ++k) {
    const int i = (anchor + k) % n;
    if (near_rho[ball.at(pos[i])]) continue;
    if (k > 1 && !near_rho[ball.at(pos[(i + n - 1) % n])]) continue;
    int len = 0;
    while (!near_rho[ball.at(pos[(i + len + 1) % n])]) ++len;
    const int x = ball.at(pos[i]), y = ball.at(pos[(i + len) % n]);
    std::ostringstream os;
    os << "run at " << i << " length " << len << ": ends " << ball.key(x) << " (to rho+ "
       << to_plus[x] << ", to rho- " << to_minus[x] << ") and " << ball.key(y) << " (to rho+ "
       << to_plus[y] << ", to rho- " << to_minus[y] << ")";
    log.lines.push_back(os.str());
    const int close = sigma + 1;
    if (to_plus[x] <= close && to_minus[y] <= close) {
      run = std::pair{i, len};
    } else if (to_minus[x] <= close && to_plus[y] <= close) {
      run = std::pair{i, len};
      swapped = true;
    }
    k += len;
  }
  if (!run) throw failure("no run off N_sigma(rho) joins rho+ to rho-");
  std::vector<VertexKey> a;
  for (int t = 0; t <= run->second; ++t) a.push_back(pos[(run->first + t) % n]);
  if (swapped) std::reverse(a.begin(), a.end());
  // a runs from near rho+ to near rho-. Pull both ends onto rho.
  auto foot = [&](const VertexKey& v, const std::vector<int>& piece) {
    const auto dv = ball.bfs_from(ball.at(v));
    int best = -1;
    for (int w : piece) {
      if (best < 0 || dv[w] < dv[best]) best = w;
    }
    return ball.key(best);
  };
  const auto xf = foot(a.front(), plus_idx), yf = foot(a.back(), minus_idx);
  auto major = concat(concat(geodesic_between(ball, xf, a.front()), PathRecord(a)),
                      geodesic_between(ball, a.back(), yf));
  int ix = -1, iy = -1;
  for (int t = 0; t <= rho.length(); ++t) {
    if (rho[t] == xf) ix = t;
    if (rho[t] == yf) iy = t;
  }
  auto minor = ix <= iy ? rho.slice(ix, iy).reversed() : rho.slice(iy, ix);
  // F' closes F back up along the rest of the original loop.
  std::vector<VertexKey> rest;
  for (int step = 0; step <= n - run->second; ++step) {
    const int t = swapped ? ((run->first - step) % n + n) % n : (run->first + run->second + step) % n;
    rest.push_back(pos[t]);
  }
  auto extension = concat(concat(geodesic_between(ball, yf, a.back()), PathRecord(rest)),
                          geodesic_between(ball, a.front(), xf));
  TruncatedQuasiCircle T;
  T.lambda = circle.lambda;
  T.c = circle.c + 5 * sigma + 5;
  T.major = major;
  T.minor = minor;
  T.extension = extension;
  T.minor_cert = certify_quasi_geodesic(ball, minor, T.lambda, T.c);
  T.extended = certify_quasi_circle(ball, as_loop(concat(major, extension)), T.lambda, T.c);
  T.loop = certify_quasi_circle(ball, as_loop(concat(major, minor)), T.lambda, T.c);
  return T;
}

}  // namespace coarse
