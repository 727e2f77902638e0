#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "metric.hpp"

namespace coarse {

struct ComponentReport {
  int id = 0;
  int size = 0;
  int max_depth_from_base = 0;
  bool touches_ball_boundary = false;
  bool deep = false;
  VertexKey representative_deep_vertex;

  // Finite-scale stand-in for a wide component: deep and reaching the rim.
  [[nodiscard]] bool wide() const { return deep && touches_ball_boundary; }
  [[nodiscard]] bool enclosed() const { return !touches_ball_boundary; }
};

// ball \ N_sigma(S), split into connected components.
struct Decomposition {
  int sigma = 0;
  int D = 0;
  std::vector<int> dist_to_base;  // per ball vertex, ball-restricted dist to S
  std::vector<int> component;     // per ball vertex, -1 inside N_sigma(S)
  std::vector<ComponentReport> components;
  int neighborhood_size = 0;
  // Complement vertices whose non-membership in N_sigma(S) could be undone by
  // a path through the outside of the ball.
  int approximate_members = 0;

  [[nodiscard]] bool empty() const { return components.empty(); }
  [[nodiscard]] bool in_neighborhood(int v) const { return component[v] < 0; }
  [[nodiscard]] int wide_count() const {
    return static_cast<int>(std::count_if(components.begin(), components.end(),
                                          [](const auto& c) { return c.wide(); }));
  }
  [[nodiscard]] int deep_count() const {
    return static_cast<int>(std::count_if(components.begin(), components.end(),
                                          [](const auto& c) { return c.deep; }));
  }
};

namespace detail {

inline std::vector<int> unique_indices(const Ball& ball, const std::vector<VertexKey>& keys) {
  std::vector<int> out;
  out.reserve(keys.size());
  for (const auto& k : keys) out.push_back(ball.at(k));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<VertexKey> all_vertices(std::initializer_list<const PathRecord*> paths) {
  std::vector<VertexKey> out;
  for (const auto* p : paths) out.insert(out.end(), p->vertices.begin(), p->vertices.end());
  return out;
}

// Membership mask of N_radius(S) inside the ball.
inline std::vector<char> neighborhood_mask(const Ball& ball, const std::vector<int>& S,
                                           int radius) {
  const auto d = ball.bfs(S, radius);
  std::vector<char> mask(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) mask[i] = d[i] != kUnreached;
  return mask;
}

// Connected components of the vertices with allowed[v] set. Labels follow
// the ball's vertex order.
inline std::vector<int> label_components(const Ball& ball, const std::vector<char>& allowed,
                                         int& count) {
  std::vector<int> label(ball.size(), -1);
  count = 0;
  std::vector<int> stack;
  for (int s = 0; s < ball.size(); ++s) {
    if (!allowed[s] || label[s] >= 0) continue;
    label[s] = count;
    stack.push_back(s);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int w : ball.neighbors(u)) {
        if (allowed[w] && label[w] < 0) {
          label[w] = count;
          stack.push_back(w);
        }
      }
    }
    ++count;
  }
  return label;
}

}  // namespace detail

inline Decomposition complement_components(const Ball& ball, const std::vector<int>& S,
                                           int sigma, int D) {
  if (sigma < 0) throw PreconditionError("sigma must be >= 0");
  if (S.empty()) throw PreconditionError("base set S is empty");
  Decomposition dec;
  dec.sigma = sigma;
  dec.D = D;
  dec.dist_to_base = ball.bfs(S);
  std::vector<char> outside(ball.size());
  int max_s_depth = 0;
  for (int s : S) max_s_depth = std::max(max_s_depth, ball.depth(s));
  for (int v = 0; v < ball.size(); ++v) {
    const int d = dec.dist_to_base[v];
    outside[v] = d == kUnreached || d > sigma;
    if (!outside[v]) {
      ++dec.neighborhood_size;
    } else if (2 * ball.radius() + 2 - ball.depth(v) - max_s_depth <= sigma) {
      ++dec.approximate_members;
    }
  }
  int count = 0;
  dec.component = detail::label_components(ball, outside, count);
  dec.components.resize(count);
  for (int i = 0; i < count; ++i) dec.components[i].id = i;
  std::vector<int> rep(count, -1);
  for (int v = 0; v < ball.size(); ++v) {
    const int c = dec.component[v];
    if (c < 0) continue;
    auto& comp = dec.components[c];
    ++comp.size;
    if (ball.on_boundary(v)) comp.touches_ball_boundary = true;
    const int d = dec.dist_to_base[v] == kUnreached ? std::numeric_limits<int>::max()
                                                     : dec.dist_to_base[v];
    if (rep[c] < 0 || d > comp.max_depth_from_base ||
        (d == comp.max_depth_from_base && ball.key(v) < ball.key(rep[c]))) {
      rep[c] = v;
      comp.max_depth_from_base = d;
    }
  }
  for (int i = 0; i < count; ++i) {
    auto& comp = dec.components[i];
    comp.deep = comp.max_depth_from_base >= D;
    comp.representative_deep_vertex = ball.key(rep[i]);
  }
  return dec;
}

inline Decomposition complement_components(const Ball& ball, const std::vector<VertexKey>& S,
                                           int sigma, int D) {
  return complement_components(ball, detail::unique_indices(ball, S), sigma, D);
}

inline Decomposition complement_components(const Ball& ball, const PathRecord& S, int sigma,
                                           int D) {
  return complement_components(ball, S.vertices, sigma, D);
}

enum class ProbeMode { QuasiGeodesic, GeodesicOnly };

enum class UbqVerdict { ConsistentWithUbq, TooFewWide, TooManyWide, Indeterminate };

inline const char* to_string(UbqVerdict v) {
  switch (v) {
    case UbqVerdict::ConsistentWithUbq: return "consistent-with-UBQ";
    case UbqVerdict::TooFewWide: return "violates(too few wide)";
    case UbqVerdict::TooManyWide: return "violates(too many wide)";
    case UbqVerdict::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

struct ProbeParams {
  Rational lambda{1};
  Rational c{0};
  int sigma = 1;
  int D = -1;  // -1: floor(R/3)
  int R = 30;
  ProbeMode mode = ProbeMode::QuasiGeodesic;

  [[nodiscard]] int depth_threshold() const { return D >= 0 ? D : R / 3; }
};

struct UbqProbeReport {
  int sigma = 0, D = 0, R = 0;
  PathRecord segment;
  QGCertificate certificate;
  int wide_count = 0;
  std::vector<ComponentReport> components;
  std::vector<int> enclosed;  // ids of deep components with no rim contact
  UbqVerdict verdict = UbqVerdict::Indeterminate;
  std::vector<std::string> warnings;
};

namespace detail {

inline UbqVerdict verdict_for(int wide) {
  if (wide == 2) return UbqVerdict::ConsistentWithUbq;
  return wide < 2 ? UbqVerdict::TooFewWide : UbqVerdict::TooManyWide;
}

// Certifies a probe segment. Closed-form families use the probe ball; the
// rest try the endpoint test, then a ball of twice the segment's reach so
// every pair is exact, then the probe ball alone.
inline QGCertificate certify_probe_segment(const Ball& probe, const PathRecord& segment,
                                           const ProbeParams& params) {
  const Rational lambda = params.mode == ProbeMode::GeodesicOnly ? Rational(1) : params.lambda;
  const Rational c = params.mode == ProbeMode::GeodesicOnly ? Rational(0) : params.c;
  const auto& oracle = probe.oracle();
  QGCertificate cert;
  if (oracle->exact_distance(segment.front(), segment.front())) {
    cert = certify_quasi_geodesic(probe, segment, lambda, c);
  } else {
    try {
      if (auto geo = geodesic_by_endpoints(*oracle, segment, lambda, c)) {
        cert = *geo;
      } else {
        int reach = 0;
        for (int i : ball_indices(probe, segment)) reach = std::max(reach, probe.depth(i));
        cert = 2 * reach <= probe.radius()
                   ? certify_quasi_geodesic(probe, segment, lambda, c)
                   : certify_quasi_geodesic(materialize_ball(oracle, probe.center(), 2 * reach),
                                            segment, lambda, c);
      }
    } catch (const ResourceError&) {
      // Over budget: far pairs stay open inside the probe ball.
      cert = certify_quasi_geodesic(probe, segment, lambda, c);
    }
  }
  if (cert.verdict == Verdict::Violated) {
    const auto& bad = *cert.offending;
    throw PreconditionError("probe segment is not a (" + to_string(lambda) + "," +
                            to_string(c) + ")-quasi-geodesic: pair (" + std::to_string(bad.i) +
                            "," + std::to_string(bad.j) + ") at distance " +
                            std::to_string(bad.d));
  }
  return cert;
}

inline UbqProbeReport probe_with(const Ball& ball, const PathRecord& segment,
                                 const QGCertificate& cert, int sigma, int D) {
  UbqProbeReport rep;
  rep.sigma = sigma;
  rep.D = D;
  rep.R = ball.radius();
  rep.segment = segment;
  rep.certificate = cert;
  auto dec = complement_components(ball, segment, sigma, D);
  rep.components = dec.components;
  rep.wide_count = dec.wide_count();
  for (const auto& comp : dec.components) {
    if (comp.deep && comp.enclosed()) rep.enclosed.push_back(comp.id);
  }
  if (dec.empty()) rep.warnings.push_back("empty decomposition: N_sigma(S) covers the ball");
  if (dec.approximate_members > 0) {
    rep.warnings.push_back(std::to_string(dec.approximate_members) +
                           " complement vertices near the rim have approximate membership");
  }
  rep.verdict = cert.verdict == Verdict::Indeterminate ? UbqVerdict::Indeterminate
                                                       : verdict_for(rep.wide_count);
  if (cert.verdict == Verdict::Indeterminate) {
    rep.warnings.push_back("segment certificate indeterminate at this ball size");
  }
  return rep;
}

}  // namespace detail

// Finite-scale UBQ probe: counts wide components of B_R \ N_sigma(segment).
inline UbqProbeReport ubq_probe(const OraclePtr& oracle, const PathRecord& segment,
                                const ProbeParams& params) {
  auto ball = materialize_ball(oracle, params.R);
  auto cert = detail::certify_probe_segment(ball, segment, params);
  return detail::probe_with(ball, segment, cert, params.sigma, params.depth_threshold());
}

// Same, along the family's named axis reaching the rim of the probe ball.
inline UbqProbeReport ubq_probe(const OraclePtr& oracle, const std::string& direction,
                                const ProbeParams& params) {
  return ubq_probe(oracle, axis_segment(oracle, direction, params.R), params);
}

// One probe per sigma over a shared ball and certificate. D is taken from
// params (default floor(R/3)).
inline std::vector<UbqProbeReport> sigma_sweep(const OraclePtr& oracle, const PathRecord& segment,
                                               const std::vector<int>& sigmas,
                                               const ProbeParams& params) {
  auto ball = materialize_ball(oracle, params.R);
  auto cert = detail::certify_probe_segment(ball, segment, params);
  std::vector<UbqProbeReport> out;
  for (int s : sigmas) {
    out.push_back(detail::probe_with(ball, segment, cert, s, params.depth_threshold()));
  }
  return out;
}

struct EndsReport {
  int r = 0, R = 0, D = 0;
  int count = 0;
  std::vector<ComponentReport> components;
};

// Components of the annulus {r <= |v| <= R} that reach depth r + D and touch
// the outer sphere.
inline EndsReport ends_probe(const OraclePtr& oracle, int r, int R, int D) {
  if (r < 0 || D < 0 || r + D > R) throw PreconditionError("ends_probe needs r + D <= R");
  auto ball = materialize_ball(oracle, R);
  std::vector<char> annulus(ball.size());
  for (int v = 0; v < ball.size(); ++v) annulus[v] = ball.depth(v) >= r;
  int count = 0;
  auto label = detail::label_components(ball, annulus, count);
  EndsReport rep{r, R, D, 0, {}};
  rep.components.resize(count);
  for (int i = 0; i < count; ++i) rep.components[i].id = i;
  for (int v = 0; v < ball.size(); ++v) {
    if (label[v] < 0) continue;
    auto& comp = rep.components[label[v]];
    if (comp.size++ == 0) comp.representative_deep_vertex = ball.key(v);
    if (ball.depth(v) - r > comp.max_depth_from_base) {
      comp.max_depth_from_base = ball.depth(v) - r;
      comp.representative_deep_vertex = ball.key(v);
    }
    if (ball.on_boundary(v)) comp.touches_ball_boundary = true;
  }
  for (auto& comp : rep.components) {
    comp.deep = comp.max_depth_from_base >= D;
    if (comp.wide()) ++rep.count;
  }
  return rep;
}

struct WitnessPair {
  PathRecord w1, w2;
  int component1 = -1, component2 = -1;
  std::vector<int> profile1, profile2;  // dist(w_i(t), rho)
};

struct WitnessSearch {
  std::optional<WitnessPair> pair;
  std::vector<ComponentReport> components;
  std::string reason;
};

namespace detail {

// Starts at the component's vertex closest to the ball centre and keeps
// stepping to the least-key neighbour one further from the base set.
inline std::pair<PathRecord, std::vector<int>> greedy_witness(const Ball& ball,
                                                              const Decomposition& dec,
                                                              int comp) {
  int start = -1;
  for (int v = 0; v < ball.size() && start < 0; ++v) {
    if (dec.component[v] == comp) start = v;
  }
  std::vector<VertexKey> path{ball.key(start)};
  std::vector<int> profile{dec.dist_to_base[start]};
  int cur = start;
  for (;;) {
    int next = -1;
    for (int w : ball.neighbors(cur)) {
      if (dec.component[w] != comp || dec.dist_to_base[w] != dec.dist_to_base[cur] + 1) continue;
      if (next < 0 || ball.key(w) < ball.key(next)) next = w;
    }
    if (next < 0) break;
    cur = next;
    path.push_back(ball.key(cur));
    profile.push_back(dec.dist_to_base[cur]);
  }
  if (profile.back() < dec.D) {
    // Greedy ascent stalled below D; walk inside the component to its deepest
    // vertex instead.
    std::vector<char> allowed(ball.size());
    for (int v = 0; v < ball.size(); ++v) allowed[v] = dec.component[v] == comp;
    const int target = ball.at(dec.components[comp].representative_deep_vertex);
    const auto from_target = ball.bfs(std::vector<int>{target}, std::numeric_limits<int>::max(),
                                      &allowed);
    path.assign(1, ball.key(start));
    profile.assign(1, dec.dist_to_base[start]);
    cur = start;
    while (cur != target) {
      int next = -1;
      for (int w : ball.neighbors(cur)) {
        if (!allowed[w] || from_target[w] != from_target[cur] - 1) continue;
        if (next < 0 || ball.key(w) < ball.key(next)) next = w;
      }
      cur = next;
      path.push_back(ball.key(cur));
      profile.push_back(dec.dist_to_base[cur]);
    }
  }
  return {PathRecord(std::move(path)), std::move(profile)};
}

}  // namespace detail

// Two diverging paths in distinct deep components of ball \ N_sigma(rho).
// Components are ranked wide first, then by depth, then by representative
// key (descending); w1 lives in the top-ranked one.
inline WitnessSearch find_witness_pair(const Ball& ball, const PathRecord& rho, int sigma,
                                       int D) {
  auto dec = complement_components(ball, rho, sigma, D);
  WitnessSearch out;
  out.components = dec.components;
  std::vector<int> deep;
  for (const auto& c : dec.components) {
    if (c.deep) deep.push_back(c.id);
  }
  if (deep.size() < 2) {
    out.reason = "fewer than two deep components (" + std::to_string(deep.size()) + ")";
    return out;
  }
  std::sort(deep.begin(), deep.end(), [&](int a, int b) {
    const auto& x = dec.components[a];
    const auto& y = dec.components[b];
    if (x.wide() != y.wide()) return x.wide();
    if (x.max_depth_from_base != y.max_depth_from_base) {
      return x.max_depth_from_base > y.max_depth_from_base;
    }
    return y.representative_deep_vertex < x.representative_deep_vertex;
  });
  WitnessPair pair;
  pair.component1 = deep[0];
  pair.component2 = deep[1];
  std::tie(pair.w1, pair.profile1) = detail::greedy_witness(ball, dec, deep[0]);
  std::tie(pair.w2, pair.profile2) = detail::greedy_witness(ball, dec, deep[1]);
  out.pair = std::move(pair);
  return out;
}

// Max over vertices of either path of the distance to the other, in the ball.
struct HausdorffWitness {
  int distance = 0;
  VertexKey vertex;
};

inline HausdorffWitness hausdorff_distance(const Ball& ball, const PathRecord& a,
                                           const PathRecord& b) {
  HausdorffWitness h;
  auto one_side = [&](const PathRecord& from, const PathRecord& to) {
    const auto d = ball.bfs(detail::unique_indices(ball, to.vertices));
    for (const auto& v : from.vertices) {
      const int x = d[ball.at(v)];
      if (x == kUnreached) throw NoPathError("paths are disconnected inside the ball");
      if (x > h.distance) {
        h.distance = x;
        h.vertex = v;
      }
    }
  };
  one_side(a, b);
  one_side(b, a);
  return h;
}

struct ProtectionReport {
  int hausdorff = 0;
  int trim1 = 0, trim2 = 0;  // vertices dropped from the front of each witness
  int component1 = -1, component2 = -1;
  bool preserved = false;
  std::string detail;
};

// Trims each witness until it clears N_sigma(N_H(rho1)) and checks that the
// tails sit in distinct deep rim-touching components of ball \ N_sigma(rho2).
inline ProtectionReport witness_protection_demo(const Ball& ball, const PathRecord& rho1,
                                                const PathRecord& rho2, const WitnessPair& pair,
                                                int sigma, int hausdorff_bound, int D = -1) {
  if (D < 0) D = ball.radius() / 3;
  ProtectionReport rep;
  auto h = hausdorff_distance(ball, rho1, rho2);
  rep.hausdorff = h.distance;
  if (h.distance > hausdorff_bound) {
    std::ostringstream os;
    os << "Hausdorff distance " << h.distance << " exceeds declared bound " << hausdorff_bound
       << " at vertex " << h.vertex;
    throw PreconditionError(os.str());
  }
  const auto to_rho1 = ball.bfs(detail::unique_indices(ball, rho1.vertices));
  auto trim = [&](const PathRecord& w) {
    int last_inside = -1;
    for (int t = 0; t <= w.length(); ++t) {
      if (to_rho1[ball.at(w[t])] <= sigma + hausdorff_bound) last_inside = t;
    }
    return last_inside + 1;
  };
  rep.trim1 = trim(pair.w1);
  rep.trim2 = trim(pair.w2);
  if (rep.trim1 > pair.w1.length() || rep.trim2 > pair.w2.length()) {
    rep.detail = "a witness never clears N_sigma(N_H(rho1)) inside the ball";
    return rep;
  }
  auto dec = complement_components(ball, rho2, sigma, D);
  auto tail_component = [&](const PathRecord& w, int from) {
    int comp = dec.component[ball.at(w[from])];
    for (int t = from; t <= w.length(); ++t) {
      if (dec.component[ball.at(w[t])] != comp) return -1;
    }
    return comp;
  };
  rep.component1 = tail_component(pair.w1, rep.trim1);
  rep.component2 = tail_component(pair.w2, rep.trim2);
  if (rep.component1 < 0 || rep.component2 < 0) {
    rep.detail = "a trimmed tail meets N_sigma(rho2)";
    return rep;
  }
  if (rep.component1 == rep.component2) {
    rep.detail = "both tails lie in the same component";
    return rep;
  }
  if (!dec.components[rep.component1].wide() || !dec.components[rep.component2].wide()) {
    rep.detail = "a tail's component is not wide at this scale";
    return rep;
  }
  rep.preserved = true;
  return rep;
}

struct ChordReport {
  std::optional<int> violated_clause;
  std::string detail;
  bool w1_meets = false, w2_meets = false;
  // Set when every hypothesis holds yet neither witness meets N_sigma(q).
  bool contradiction = false;

  [[nodiscard]] bool hypotheses_hold() const { return !violated_clause; }
};

namespace detail {

// Clauses shared by the chord and loop-enclosure scenarios: rho simple, two
// wide components holding the witnesses, p joining w1(0) to w2(0), and
// rho \ N_10sigma(p) splitting into two end pieces.
struct RhoAudit {
  std::optional<int> violated_clause;
  std::string detail;
  Decomposition dec;
  int u1 = -1, u2 = -1;
  std::vector<char> K;
  int plus_end = -1, minus_start = 0;  // rho[0..plus_end], rho[minus_start..]
};

inline bool walks(const GraphOracle& oracle, const PathRecord& path, std::string& why) {
  try {
    check_path(oracle, path);
  } catch (const PreconditionError& e) {
    why = e.what();
    return false;
  }
  return true;
}

// End pieces of rho outside the mask, as (last index of the front piece,
// first index of the back piece). Empty pieces give -1 / n+1.
inline std::pair<int, int> end_pieces(const Ball& ball, const PathRecord& rho,
                                      const std::vector<char>& mask) {
  const int n = rho.length();
  int plus_end = -1, minus_start = n + 1;
  while (plus_end + 1 <= n && !mask[ball.at(rho[plus_end + 1])]) ++plus_end;
  while (minus_start - 1 >= 0 && !mask[ball.at(rho[minus_start - 1])]) --minus_start;
  return {plus_end, minus_start};
}

// 1 or 2 for the front or back piece holding v, 0 otherwise.
inline int piece_of(const PathRecord& rho, const VertexKey& v, int plus_end, int minus_start) {
  for (int t = 0; t <= rho.length(); ++t) {
    if (rho[t] == v) return t <= plus_end ? 1 : (t >= minus_start ? 2 : 0);
  }
  return 0;
}

inline RhoAudit audit_rho_and_p(const Ball& ball, const PathRecord& rho, const WitnessPair& pair,
                                const PathRecord& p, int sigma, int D) {
  RhoAudit a;
  auto fail = [&](int clause, std::string why) {
    a.violated_clause = clause;
    a.detail = std::move(why);
    return a;
  };
  const auto& oracle = *ball.oracle();
  std::string why;
  if (!walks(oracle, rho, why)) return fail(1, why);
  if (unique_indices(ball, rho.vertices).size() != rho.vertices.size()) {
    return fail(1, "rho is not simple");
  }
  a.dec = complement_components(ball, rho, sigma, D);
  if (a.dec.wide_count() != 2) {
    return fail(2, "ball \\ N_sigma(rho) has " + std::to_string(a.dec.wide_count()) +
                       " wide components");
  }
  auto home = [&](const PathRecord& w) {
    const int c = a.dec.component[ball.at(w.front())];
    for (const auto& v : w.vertices) {
      if (a.dec.component[ball.at(v)] != c) return -1;
    }
    return c >= 0 && a.dec.components[c].wide() ? c : -1;
  };
  a.u1 = home(pair.w1);
  a.u2 = home(pair.w2);
  if (a.u1 < 0 || a.u2 < 0 || a.u1 == a.u2) {
    return fail(3, "witnesses do not lie in distinct wide components");
  }
  if (!walks(oracle, p, why)) return fail(4, why);
  if (p.empty() || p.front() != pair.w1.front() || p.back() != pair.w2.front()) {
    return fail(4, "p does not connect w1(0) to w2(0)");
  }
  a.K = neighborhood_mask(ball, unique_indices(ball, p.vertices), 10 * sigma);
  std::tie(a.plus_end, a.minus_start) = end_pieces(ball, rho, a.K);
  if (a.plus_end < 0 || a.minus_start > rho.length() || a.plus_end >= a.minus_start) {
    return fail(5, "rho \\ N_10sigma(p) does not split into two end pieces");
  }
  return a;
}

inline std::optional<VertexKey> first_in(const Ball& ball, const PathRecord& q,
                                         const std::vector<char>& mask) {
  for (const auto& v : q.vertices) {
    if (mask[ball.at(v)]) return v;
  }
  return std::nullopt;
}

}  // namespace detail

// Audits the six-clause chord scenario, then reports which witnesses meet
// N_sigma(q).
inline ChordReport chord_witness_check(const Ball& ball, const PathRecord& rho,
                                       const WitnessPair& pair, const PathRecord& p,
                                       const PathRecord& q, int sigma, int D = -1) {
  if (D < 0) D = ball.radius() / 3;
  ChordReport rep;
  auto fail = [&](int clause, std::string why) {
    rep.violated_clause = clause;
    rep.detail = std::move(why);
    return rep;
  };
  auto a = detail::audit_rho_and_p(ball, rho, pair, p, sigma, D);
  if (a.violated_clause) return fail(*a.violated_clause, a.detail);
  // 6: q joins the two pieces and avoids K.
  std::string why;
  if (!detail::walks(*ball.oracle(), q, why)) return fail(6, why);
  const int e1 = detail::piece_of(rho, q.front(), a.plus_end, a.minus_start);
  const int e2 = detail::piece_of(rho, q.back(), a.plus_end, a.minus_start);
  if (e1 == 0 || e2 == 0 || e1 == e2) return fail(6, "q does not join the two end pieces of rho");
  if (auto hit = detail::first_in(ball, q, a.K)) {
    std::ostringstream os;
    os << "q meets N_10sigma(p) at " << *hit;
    return fail(6, os.str());
  }
  const auto near_q =
      detail::neighborhood_mask(ball, detail::unique_indices(ball, q.vertices), sigma);
  auto meets = [&](const PathRecord& w) {
    return std::any_of(w.vertices.begin(), w.vertices.end(),
                       [&](const VertexKey& v) { return near_q[ball.at(v)] != 0; });
  };
  rep.w1_meets = meets(pair.w1);
  rep.w2_meets = meets(pair.w2);
  rep.contradiction = !rep.w1_meets && !rep.w2_meets;
  return rep;
}

}  // namespace coarse
