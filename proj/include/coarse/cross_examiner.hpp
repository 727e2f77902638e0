#pragma once

#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/container_hash/hash.hpp>

#include "growth.hpp"
#include "separation.hpp"

namespace coarse {

// Finite-scale cross-examiner. Indices run 0..2; gamma[i], w[i] and q[i]
// stand for the 1-based gamma_{i+1}, w_{i+1}, q_{i+1}. Rays are stored as
// segments starting at their base.
struct CrossExaminer {
  VertexKey v0;
  std::array<PathRecord, 3> gamma, w, q;
  int R = 0, r = 0, sigma = 1;
  Rational lambda{1}, c{0};

  // rho_i = gamma_{i+1}^-1 . gamma_{i+2}.
  [[nodiscard]] PathRecord rho(int i) const {
    return concat(gamma[(i + 1) % 3].reversed(), gamma[(i + 2) % 3]);
  }
};

inline std::size_t fingerprint(const CrossExaminer& ce) {
  std::size_t h = 0;
  VertexKeyHash kh;
  auto add_path = [&](const PathRecord& p) {
    boost::hash_combine(h, p.vertices.size());
    for (const auto& v : p.vertices) boost::hash_combine(h, kh(v));
  };
  boost::hash_combine(h, kh(ce.v0));
  for (const auto* set : {&ce.gamma, &ce.w, &ce.q}) {
    for (const auto& p : *set) add_path(p);
  }
  for (auto x : {ce.R, ce.r, ce.sigma}) boost::hash_combine(h, x);
  for (const auto& x : {ce.lambda, ce.c}) {
    boost::hash_combine(h, x.numerator());
    boost::hash_combine(h, x.denominator());
  }
  return h;
}

struct AxiomCheck {
  bool pass = true;
  int index = -1;  // which i failed, 0-based
  std::string detail;
  std::optional<VertexKey> witness;
};

struct CEReport {
  std::array<AxiomCheck, 6> axioms;  // CE1..CE6
  std::size_t fingerprint = 0;

  [[nodiscard]] bool all_pass() const {
    return std::all_of(axioms.begin(), axioms.end(), [](const auto& a) { return a.pass; });
  }
  // 1-based numbers of the failing axioms.
  [[nodiscard]] std::vector<int> failed() const {
    std::vector<int> out;
    for (int k = 0; k < 6; ++k) {
      if (!axioms[k].pass) out.push_back(k + 1);
    }
    return out;
  }
};

namespace detail {

inline const char* piece_name(int kind, int i) {
  static const char* names[3][3] = {{"gamma1", "gamma2", "gamma3"},
                                    {"w1", "w2", "w3"},
                                    {"q1", "q2", "q3"}};
  return names[kind][i];
}

// Vertices of w after its last visit to the mask.
inline std::vector<int> tail_outside(const Ball& ball, const PathRecord& w, const Decomposition& dec) {
  std::vector<int> tail;
  for (const auto& v : w.vertices) {
    const int i = ball.at(v);
    if (dec.in_neighborhood(i)) {
      tail.clear();
    } else {
      tail.push_back(i);
    }
  }
  return tail;
}

inline std::vector<int> path_indices(const Ball& ball, std::initializer_list<const PathRecord*> paths) {
  return unique_indices(ball, all_vertices(paths));
}

}  // namespace detail

// Checks CE1-CE6 for every i. CE3 reads "witnesses" at finite scale: the
// parts of w_i and gamma_i after their last visit to N_sigma(rho_i) lie in
// distinct wide components. CE4 is checked on the stored range of w_i.
inline CEReport validate_cross_examiner(const Ball& ball, const CrossExaminer& ce, int D = -1) {
  if (ce.sigma < 1 || !(ce.R > ce.r && ce.r > 10 * ce.sigma)) {
    throw PreconditionError("constants must satisfy R > r > 10 sigma >= 10");
  }
  detail::check_constants(ce.lambda, ce.c);
  if (D < 0) D = ball.radius() / 3;
  const std::array<const std::array<PathRecord, 3>*, 3> kinds{&ce.gamma, &ce.w, &ce.q};
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 3; ++i) {
      const auto& p = (*kinds[k])[i];
      if (p.empty()) throw PreconditionError(std::string(detail::piece_name(k, i)) + " is empty");
      for (const auto& v : p.vertices) {
        if (!ball.contains(v)) {
          std::ostringstream os;
          os << detail::piece_name(k, i) << " leaves the ball of radius " << ball.radius() << " at " << v;
          throw OutOfBallError(os.str());
        }
      }
      std::string why;
      if (!detail::walks(*ball.oracle(), p, why)) {
        throw PreconditionError(std::string(detail::piece_name(k, i)) + ": " + why);
      }
    }
    if (k == 0) {
      for (int i = 0; i < 3; ++i) {
        if (ce.gamma[i].front() != ce.v0) {
          throw PreconditionError(std::string(detail::piece_name(0, i)) + " does not start at v0");
        }
      }
    }
  }
  if (!ball.contains(ce.v0)) throw OutOfBallError("v0 is outside the ball");

  CEReport rep;
  rep.fingerprint = fingerprint(ce);
  auto fail = [&](int axiom, int i, std::string why, std::optional<VertexKey> v = std::nullopt) {
    auto& a = rep.axioms[axiom - 1];
    if (!a.pass) return;
    a.pass = false;
    a.index = i;
    a.detail = std::move(why);
    a.witness = std::move(v);
  };
  const int ten = 10 * ce.sigma;
  const auto near_q = detail::neighborhood_mask(
      ball, detail::path_indices(ball, {&ce.q[0], &ce.q[1], &ce.q[2]}), ten);
  const auto from_v0 = ball.bfs_from(ball.at(ce.v0));

  for (int i = 0; i < 3; ++i) {
    const auto rho = ce.rho(i);
    const std::string tag = "i=" + std::to_string(i + 1) + ": ";

    // CE1
    auto cert = certify_quasi_geodesic(ball, rho, ce.lambda, ce.c);
    if (!cert.certified()) {
      std::ostringstream os;
      os << tag << "rho is " << to_string(cert.verdict) << " at (" << to_string(ce.lambda) << ","
         << to_string(ce.c) << ")";
      std::optional<VertexKey> at;
      if (cert.offending) {
        os << ", pair " << cert.offending->i << "," << cert.offending->j << " at distance "
           << cert.offending->d;
        at = rho[cert.offending->i];
      }
      fail(1, i, os.str(), at);
    }

    // CE2: positions of rho outside N_10sigma(q) form runs; v0 and w_i(0)
    // must share one.
    {
      const int n = rho.length();
      const int base = ce.gamma[(i + 1) % 3].length();
      auto masked = [&](int t) { return near_q[ball.at(rho[t])] != 0; };
      if (masked(base)) {
        fail(2, i, tag + "v0 lies within 10 sigma of some q", ce.v0);
      } else {
        int lo = base, hi = base;
        while (lo > 0 && !masked(lo - 1)) --lo;
        while (hi < n && !masked(hi + 1)) ++hi;
        bool found = false;
        for (int t = lo; t <= hi && !found; ++t) found = rho[t] == ce.w[i].front();
        if (!found) {
          fail(2, i, tag + "w(0) is not in the component of v0 in rho \\ N_10sigma(q)", ce.w[i].front());
        }
      }
    }

    // CE3
    {
      auto dec = complement_components(ball, rho, ce.sigma, D);
      const auto tw = detail::tail_outside(ball, ce.w[i], dec);
      const auto tg = detail::tail_outside(ball, ce.gamma[i], dec);
      if (tw.empty() || tg.empty()) {
        fail(3, i, tag + (tw.empty() ? "w" : "gamma") + " never leaves N_sigma(rho)");
      } else {
        const int cw = dec.component[tw.front()], cg = dec.component[tg.front()];
        if (cw == cg) {
          fail(3, i, tag + "w and gamma end in the same component of ball \\ N_sigma(rho)",
               ball.key(tw.front()));
        } else if (!dec.components[cw].wide() || !dec.components[cg].wide()) {
          fail(3, i, tag + "a witness ends in a component that is not wide",
               ball.key(dec.components[cw].wide() ? tg.front() : tw.front()));
        }
      }
    }

    // CE4
    {
      const auto d = ball.bfs(detail::unique_indices(ball, rho.vertices));
      for (int t = ce.r + 1; t <= ce.w[i].length(); ++t) {
        if (d[ball.at(ce.w[i][t])] <= ten) {
          fail(4, i, tag + "w(" + std::to_string(t) + ") is within 10 sigma of rho", ce.w[i][t]);
          break;
        }
      }
    }

    // CE5
    {
      const auto& qi = ce.q[i];
      auto on = [](const PathRecord& g, const VertexKey& v) {
        return std::find(g.vertices.begin(), g.vertices.end(), v) != g.vertices.end();
      };
      if (!on(ce.gamma[(i + 1) % 3], qi.front())) {
        fail(5, i, tag + "q does not start on gamma_{i+1}", qi.front());
      } else if (!on(ce.gamma[(i + 2) % 3], qi.back())) {
        fail(5, i, tag + "q does not end on gamma_{i+2}", qi.back());
      } else {
        const auto avoid = detail::neighborhood_mask(
            ball, detail::path_indices(ball, {&ce.w[(i + 1) % 3], &ce.w[(i + 2) % 3], &ce.gamma[i]}), ten);
        if (auto hit = detail::first_in(ball, qi, avoid)) {
          fail(5, i, tag + "q enters N_10sigma(w_{i+1} u w_{i+2} u gamma_i)", *hit);
        }
      }
    }

    // CE6
    for (const auto& v : ce.q[i].vertices) {
      const int d = from_v0[ball.at(v)];
      if (d > ce.R - ten || d <= ce.r + ten) {
        std::ostringstream os;
        os << tag << "q leaves the annulus (r+10sigma, R-10sigma] at distance " << d;
        fail(6, i, os.str(), v);
        break;
      }
    }
  }
  return rep;
}

namespace detail {

// Counterclockwise L1 arc of radius m starting on axis a0 (0:+x, 1:+y, 2:-x,
// 3:-y) and turning through `quadrants` quarters. Norms alternate m+1, m.
inline PathRecord l1_arc(int m, int a0, int quadrants) {
  static const int ex[4] = {1, 0, -1, 0}, ey[4] = {0, 1, 0, -1};
  std::vector<VertexKey> out{{m * ex[a0], m * ey[a0]}};
  for (int k = 0; k < quadrants; ++k) {
    const int a = (a0 + k) % 4, b = (a + 1) % 4;
    for (int s = 0; s < m; ++s) {
      const auto p = out.back();
      out.push_back({p[0] + ex[b], p[1] + ey[b]});
      out.push_back({p[0] + ex[b] - ex[a], p[1] + ey[b] - ey[a]});
    }
  }
  return PathRecord(std::move(out));
}

inline PathRecord z2_ray(int dx, int dy, int length) {
  std::vector<VertexKey> out;
  for (int t = 0; t <= length; ++t) out.push_back({t * dx, t * dy});
  return PathRecord(std::move(out));
}

// Staircase along the diagonal (sx, sy), x step first.
inline PathRecord z2_diagonal(int sx, int sy, int length) {
  std::vector<VertexKey> out{{0, 0}};
  for (int t = 1; t <= length; ++t) {
    const auto p = out.back();
    out.push_back(t % 2 ? VertexKey{p[0] + sx, p[1]} : VertexKey{p[0], p[1] + sy});
  }
  return PathRecord(std::move(out));
}

}  // namespace detail

// Smallest halflength the Z^2 construction accepts.
inline int minimal_ce_halflength(int sigma, int r_scale) {
  const int r = r_scale * sigma;
  int H = 1;
  while (3 * H / 4 < r + 20 * sigma + 2) ++H;
  return H;
}

// gamma = +y, -x, +x rays; w1 = -y ray, w2 / w3 = first / second quadrant
// diagonals; q = L1 arcs at one radius inside the annulus. R = 3H/4 so
// paths beyond N_R(v0) still fit in the ball of radius H.
inline CrossExaminer construct_ce_z2(int sigma = 1, int r_scale = 21, int halflength = 80) {
  if (sigma < 1) throw PreconditionError("sigma must be >= 1");
  if (r_scale < 21) {
    throw PreconditionError("r_scale must be >= 21: the diagonal witnesses are only floor(t/2) from rho");
  }
  const int H_min = minimal_ce_halflength(sigma, r_scale);
  if (halflength < H_min) {
    throw PreconditionError("halflength " + std::to_string(halflength) +
                            " too small; minimal feasible halflength is " + std::to_string(H_min));
  }
  CrossExaminer ce;
  ce.v0 = {0, 0};
  ce.sigma = sigma;
  ce.r = r_scale * sigma;
  ce.R = 3 * halflength / 4;
  const int H = halflength;
  ce.gamma = {detail::z2_ray(0, 1, H), detail::z2_ray(-1, 0, H), detail::z2_ray(1, 0, H)};
  ce.w = {detail::z2_ray(0, -1, H), detail::z2_diagonal(1, 1, H), detail::z2_diagonal(-1, 1, H)};
  const int inner = ce.r + 10 * sigma + 1, outer = ce.R - 10 * sigma;
  const int m = (inner + outer - 1) / 2;
  ce.q = {detail::l1_arc(m, 2, 2), detail::l1_arc(m, 0, 1), detail::l1_arc(m, 1, 1)};
  return ce;
}

enum class SeparationStatus { Separated, NotSeparated, Indeterminate };

inline const char* to_string(SeparationStatus s) {
  switch (s) {
    case SeparationStatus::Separated: return "separated";
    case SeparationStatus::NotSeparated: return "not-separated";
    case SeparationStatus::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

struct SeparationRow {
  SeparationStatus status = SeparationStatus::Indeterminate;
  int component_a = -1, component_b = -1;  // of w_i and w_{i+1}
  std::string detail;
};

struct SeparationReport {
  std::array<SeparationRow, 3> rows;
  [[nodiscard]] bool all_separated() const {
    return std::all_of(rows.begin(), rows.end(),
                       [](const auto& r) { return r.status == SeparationStatus::Separated; });
  }
};

// For each i: do w_i and w_{i+1} end in distinct deep components of
// ball \ N_sigma(rho_i)? `validation` must come from this very examiner.
inline SeparationReport witness_separation_check(const Ball& ball, const CrossExaminer& ce,
                                                 const CEReport& validation, int sigma = -1,
                                                 int D = -1) {
  if (validation.fingerprint != fingerprint(ce)) {
    throw PreconditionError("cross-examiner has not been validated");
  }
  if (sigma < 0) sigma = ce.sigma;
  if (D < 0) D = ball.radius() / 3;
  SeparationReport rep;
  for (int i = 0; i < 3; ++i) {
    auto& row = rep.rows[i];
    auto dec = complement_components(ball, ce.rho(i), sigma, D);
    const auto ta = detail::tail_outside(ball, ce.w[i], dec);
    const auto tb = detail::tail_outside(ball, ce.w[(i + 1) % 3], dec);
    if (ta.empty() || tb.empty()) {
      row.detail = "a witness lies entirely inside N_sigma(rho)";
      continue;
    }
    row.component_a = dec.component[ta.front()];
    row.component_b = dec.component[tb.front()];
    if (row.component_a == row.component_b) {
      row.status = SeparationStatus::NotSeparated;
      row.detail = "both witnesses end in component " + std::to_string(row.component_a);
    } else if (!dec.components[row.component_a].deep || !dec.components[row.component_b].deep) {
      row.status = SeparationStatus::NotSeparated;
      row.detail = "a witness ends in a shallow component";
    } else {
      row.status = SeparationStatus::Separated;
    }
  }
  return rep;
}

// Delta-graph labels: 0..2 are gamma_1..gamma_3 (red), 3..5 are w_1..w_3
// (green).
using DeltaPath = std::vector<int>;

inline std::string delta_label_name(int label) {
  return (label < 3 ? "gamma" : "w") + std::to_string(label % 3 + 1);
}

struct DeltaGraph {
  std::array<std::array<bool, 6>, 6> adj{};

  [[nodiscard]] bool adjacent(int a, int b) const { return adj[a][b]; }
  [[nodiscard]] int edge_count() const {
    int n = 0;
    for (int a = 0; a < 6; ++a)
      for (int b = a + 1; b < 6; ++b) n += adj[a][b];
    return n;
  }
  void connect(int a, int b) { adj[a][b] = adj[b][a] = true; }
};

// w_i joined to gamma_{i+1} and gamma_{i+2}: the alternating 6-cycle.
inline DeltaGraph alternating_cycle() {
  DeltaGraph g;
  for (int i = 0; i < 3; ++i) {
    g.connect(3 + i, (i + 1) % 3);
    g.connect(3 + i, (i + 2) % 3);
  }
  return g;
}

namespace detail {

inline std::array<std::vector<char>, 6> ray_masks(const Ball& ball, const CrossExaminer& ce, int radius) {
  std::array<std::vector<char>, 6> masks;
  for (int l = 0; l < 6; ++l) {
    const auto& ray = l < 3 ? ce.gamma[l] : ce.w[l - 3];
    masks[l] = neighborhood_mask(ball, unique_indices(ball, ray.vertices), radius);
  }
  return masks;
}

}  // namespace detail

// Edge a-b iff some path inside the ball runs from ray a to ray b avoiding
// the two_sigma-neighbourhoods of the other four rays.
inline DeltaGraph delta_graph(const Ball& ball, const CrossExaminer& ce, int two_sigma) {
  const auto masks = detail::ray_masks(ball, ce, two_sigma);
  DeltaGraph g;
  for (int a = 0; a < 6; ++a) {
    for (int b = a + 1; b < 6; ++b) {
      std::vector<char> allowed(ball.size(), 1);
      for (int l = 0; l < 6; ++l) {
        if (l == a || l == b) continue;
        for (int v = 0; v < ball.size(); ++v) allowed[v] = allowed[v] && !masks[l][v];
      }
      auto ray_allowed = [&](int l) {
        const auto& ray = l < 3 ? ce.gamma[l] : ce.w[l - 3];
        std::vector<int> out;
        for (int v : detail::unique_indices(ball, ray.vertices)) {
          if (allowed[v]) out.push_back(v);
        }
        return out;
      };
      const auto src = ray_allowed(a);
      if (src.empty()) continue;
      const auto d = ball.bfs(src, std::numeric_limits<int>::max(), &allowed);
      for (int v : ray_allowed(b)) {
        if (d[v] != kUnreached) {
          g.connect(a, b);
          break;
        }
      }
    }
  }
  return g;
}

// Label sequence of the rays whose two_sigma-neighbourhoods p visits, with
// repeats collapsed. p must stay outside N_R(v0).
inline DeltaPath induced_delta_path(const Ball& ball, const PathRecord& p, const CrossExaminer& ce,
                                    int two_sigma) {
  const auto from_v0 = ball.bfs_from(ball.at(ce.v0));
  const auto masks = detail::ray_masks(ball, ce, two_sigma);
  DeltaPath out;
  for (const auto& v : p.vertices) {
    const int i = ball.at(v);
    if (from_v0[i] <= ce.R) {
      std::ostringstream os;
      os << "p enters N_R(v0) at " << v;
      throw PreconditionError(os.str());
    }
    std::vector<int> hits;
    for (int l = 0; l < 6; ++l) {
      if (masks[l][i]) hits.push_back(l);
    }
    if (hits.size() > 1) {
      std::ostringstream os;
      os << "pairwise-separation violation at " << v << ": within " << two_sigma << " of both "
         << delta_label_name(hits[0]) << " and " << delta_label_name(hits[1]);
      throw PreconditionError(os.str());
    }
    if (hits.size() == 1 && (out.empty() || out.back() != hits[0])) out.push_back(hits[0]);
  }
  return out;
}

// dp[start..end] runs from gamma_{pi[0]} to gamma_{pi[1]} and never visits
// w_{pi[2]} (0-based indices).
struct GoodSubpath {
  std::array<int, 3> pi{};
  int start = 0, end = 0;
};

inline void check_delta_path(const DeltaPath& dp, const DeltaGraph& g) {
  for (std::size_t k = 0; k < dp.size(); ++k) {
    if (dp[k] < 0 || dp[k] >= 6) throw PreconditionError("delta label out of range");
    if (k > 0 && !g.adjacent(dp[k - 1], dp[k])) {
      throw PreconditionError("not a delta path: " + delta_label_name(dp[k - 1]) + " and " +
                              delta_label_name(dp[k]) + " are not adjacent");
    }
  }
}

// One pass: at each red gamma_b, look back to the latest other red gamma_a
// whose stretch to here misses the third green.
inline std::optional<GoodSubpath> find_good_subpath(const DeltaPath& dp) {
  check_delta_path(dp, alternating_cycle());
  if (dp.empty() || dp.front() != 0 || dp.back() != 1 ||
      std::find(dp.begin(), dp.end(), 2) == dp.end()) {
    throw PreconditionError("delta path must start at gamma1, end at gamma2 and visit gamma3");
  }
  std::array<int, 6> last;
  last.fill(-1);
  for (int e = 0; e < static_cast<int>(dp.size()); ++e) {
    const int b = dp[e];
    if (b < 3) {
      for (int a = 0; a < 3; ++a) {
        if (a == b || last[a] < 0) continue;
        const int c = 3 - a - b;
        if (last[a] > last[3 + c]) return GoodSubpath{{a, b, c}, last[a], e};
      }
    }
    last[b] = e;
  }
  return std::nullopt;
}

struct GoodSubpathSweep {
  long long paths = 0;
  long long counterexamples = 0;
  std::optional<DeltaPath> first_counterexample;
};

// Every walk on the alternating 6-cycle with at most max_length edges that
// starts at gamma1, ends at gamma2 and visits gamma3 must have a good
// subpath; each answer is re-validated.
inline GoodSubpathSweep exhaustive_good_subpath_check(int max_length) {
  const auto g = alternating_cycle();
  GoodSubpathSweep rep;
  DeltaPath dp{0};
  auto valid = [&](const GoodSubpath& s) {
    if (dp[s.start] != s.pi[0] || dp[s.end] != s.pi[1] || s.start >= s.end) return false;
    bool third = false;
    for (int k = s.start; k <= s.end; ++k) {
      if (dp[k] == 3 + s.pi[2]) return false;
      third = third || dp[k] == s.pi[2];
    }
    return third;
  };
  auto visit = [&](auto&& self) -> void {
    if (dp.back() == 1 && std::find(dp.begin(), dp.end(), 2) != dp.end()) {
      ++rep.paths;
      auto s = find_good_subpath(dp);
      if (!s || !valid(*s)) {
        ++rep.counterexamples;
        if (!rep.first_counterexample) rep.first_counterexample = dp;
      }
    }
    if (static_cast<int>(dp.size()) - 1 == max_length) return;
    for (int next = 0; next < 6; ++next) {
      if (!g.adjacent(dp.back(), next)) continue;
      dp.push_back(next);
      self(self);
      dp.pop_back();
    }
  };
  visit(visit);
  return rep;
}

inline RayRegionAudit ray_region_harness(const Ball& ball, const CrossExaminer& ce,
                                    const std::vector<std::vector<VertexKey>>& Z,
                                    const std::vector<int>& d, const Rational& K) {
  return ray_region_harness(ball, ce.v0, ce.gamma, Z, d, K);
}

}  // namespace coarse
