#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ball.hpp"
#include "rational.hpp"

namespace coarse {

// Unit-speed vertex sequence; vertex i sits at parameter i. A loop repeats its
// first vertex at the end.
struct PathRecord {
  enum class Kind { Segment, Loop };

  std::vector<VertexKey> vertices;
  Kind kind = Kind::Segment;

  PathRecord() = default;
  explicit PathRecord(std::vector<VertexKey> vs, Kind k = Kind::Segment)
      : vertices(std::move(vs)), kind(k) {
    if (kind == Kind::Loop && (vertices.empty() || vertices.front() != vertices.back())) {
      throw PreconditionError("malformed loop: first and last vertex differ");
    }
  }

  [[nodiscard]] int length() const { return static_cast<int>(vertices.size()) - 1; }
  [[nodiscard]] bool empty() const { return vertices.empty(); }
  [[nodiscard]] bool is_loop() const { return kind == Kind::Loop; }
  [[nodiscard]] const VertexKey& operator[](std::size_t i) const { return vertices[i]; }
  [[nodiscard]] const VertexKey& front() const { return vertices.front(); }
  [[nodiscard]] const VertexKey& back() const { return vertices.back(); }

  [[nodiscard]] PathRecord reversed() const {
    PathRecord r = *this;
    std::reverse(r.vertices.begin(), r.vertices.end());
    return r;
  }
  // Vertices [from, to] inclusive, as a segment.
  [[nodiscard]] PathRecord slice(int from, int to) const {
    return PathRecord({vertices.begin() + from, vertices.begin() + to + 1});
  }
};

// this·other, where other must start where this ends.
inline PathRecord concat(const PathRecord& a, const PathRecord& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.back() != b.front()) {
    std::ostringstream os;
    os << "cannot concatenate paths: " << a.back() << " != " << b.front();
    throw PreconditionError(os.str());
  }
  std::vector<VertexKey> vs = a.vertices;
  vs.insert(vs.end(), b.vertices.begin() + 1, b.vertices.end());
  return PathRecord(std::move(vs));
}

inline PathRecord as_loop(const PathRecord& p) {
  return PathRecord(p.vertices, PathRecord::Kind::Loop);
}

// Throws unless consecutive vertices are adjacent under the oracle.
inline void check_path(const GraphOracle& oracle, const PathRecord& p) {
  for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) {
    const auto nb = oracle.neighbors(p.vertices[i]);
    if (!std::binary_search(nb.begin(), nb.end(), p.vertices[i + 1])) {
      std::ostringstream os;
      os << "path step " << i << " is not an edge: " << p.vertices[i] << " -> "
         << p.vertices[i + 1];
      throw PreconditionError(os.str());
    }
  }
}

inline std::vector<int> ball_indices(const Ball& ball, const PathRecord& p) {
  std::vector<int> out;
  out.reserve(p.vertices.size());
  for (const auto& v : p.vertices) out.push_back(ball.at(v));
  return out;
}

struct DistanceWitness {
  VertexKey u, v;
  std::int64_t d = 0;
  bool exact = false;
};

namespace detail {

// Some true geodesic stays inside the ball once 2R >= du + dv + d.
inline bool half_perimeter_exact(int radius, std::int64_t du, std::int64_t dv, std::int64_t d) {
  return 2 * std::int64_t{radius} >= du + dv + d;
}

// Sound lower bound on the true distance given a ball distance that may be
// too long: a shorter path would have to leave the ball.
inline std::int64_t ball_lower_bound(int radius, std::int64_t du, std::int64_t dv,
                                     std::int64_t d) {
  if (half_perimeter_exact(radius, du, dv, d)) return d;
  const std::int64_t escape = 2 * std::int64_t{radius} + 2 - du - dv;
  return std::max(std::abs(du - dv), std::min(d, escape));
}

}  // namespace detail

inline DistanceWitness dist(const Ball& ball, const VertexKey& u, const VertexKey& v) {
  const int iu = ball.at(u), iv = ball.at(v);
  DistanceWitness w{u, v, 0, true};
  if (iu == iv) return w;
  const auto d = ball.bfs_from(iu);
  if (d[iv] == kUnreached) {
    std::ostringstream os;
    os << u << " and " << v << " are disconnected inside the ball";
    throw NoPathError(os.str());
  }
  w.d = d[iv];
  w.exact = detail::half_perimeter_exact(ball.radius(), ball.depth(iu), ball.depth(iv), w.d);
  return w;
}

enum class Verdict { Certified, Violated, Indeterminate };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Certified: return "certified";
    case Verdict::Violated: return "violated";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

struct PairDistance {
  int i = 0, j = 0;
  std::int64_t d = 0;
  bool exact = true;
};

struct QGCertificate {
  Rational lambda{1}, c{0};
  Verdict verdict = Verdict::Certified;
  bool exact = true;
  // Pair of minimal slack in dist >= gap/lambda - c.
  PairDistance worst_pair;
  // Set when verdict is Violated or Indeterminate.
  std::optional<PairDistance> offending;

  [[nodiscard]] bool certified() const { return verdict == Verdict::Certified; }
  explicit operator bool() const { return certified(); }
};

namespace detail {

// Scaled slack of d >= gap/lambda - c, i.e. d*ln*cd - gap*ld*cd + cn*ln.
// Same sign as the true slack.
inline std::int64_t scaled_slack(std::int64_t d, std::int64_t gap, const Rational& lambda,
                                 const Rational& c) {
  const std::int64_t ln = lambda.numerator(), ld = lambda.denominator();
  const std::int64_t cn = c.numerator(), cd = c.denominator();
  return d * ln * cd - gap * ld * cd + cn * ln;
}

inline void check_constants(const Rational& lambda, const Rational& c) {
  if (lambda < 1) throw PreconditionError("lambda must be >= 1, got " + to_string(lambda));
  if (c < 0) throw PreconditionError("c must be >= 0, got " + to_string(c));
}

// Certifies every pair (s,t) of path positions whose parameter gap (as given
// by gap_of) is at most max_gap. Distances come from the oracle's closed form
// when it has one, else from ball BFS with the half-perimeter rule.
template <class GapOf>
QGCertificate certify_pairs(const Ball& ball, const std::vector<VertexKey>& verts,
                            const Rational& lambda, const Rational& c, int max_gap,
                            GapOf gap_of) {
  check_constants(lambda, c);
  QGCertificate cert;
  cert.lambda = lambda;
  cert.c = c;
  const int n = static_cast<int>(verts.size());
  std::vector<int> idx;
  idx.reserve(n);
  for (const auto& v : verts) idx.push_back(ball.at(v));

  const auto& oracle = *ball.oracle();
  const bool closed_form = n > 0 && oracle.exact_distance(verts[0], verts[0]).has_value();
  std::int64_t worst = std::numeric_limits<std::int64_t>::max();
  std::optional<PairDistance> violated, open;
  std::int64_t violated_slack = 0;

  for (int s = 0; s < n; ++s) {
    std::vector<int> bfs;
    if (!closed_form) bfs = ball.bfs_from(idx[s], max_gap + 1);
    for (int t = s + 1; t < n; ++t) {
      const int gap = gap_of(s, t);
      if (gap > max_gap) continue;
      PairDistance pd{s, t, 0, true};
      std::int64_t lower;
      if (closed_form) {
        pd.d = *oracle.exact_distance(verts[s], verts[t]);
        lower = pd.d;
      } else {
        // Paths are inside the ball, so BFS within max_gap+1 reaches t unless
        // the path itself is longer than the gap.
        pd.d = bfs[idx[t]] == kUnreached ? max_gap + 1 : bfs[idx[t]];
        const int du = ball.depth(idx[s]), dv = ball.depth(idx[t]);
        pd.exact = detail::half_perimeter_exact(ball.radius(), du, dv, pd.d);
        lower = detail::ball_lower_bound(ball.radius(), du, dv, pd.d);
      }
      const std::int64_t upper_slack = scaled_slack(pd.d, gap, lambda, c);
      if (upper_slack < worst) {
        worst = upper_slack;
        cert.worst_pair = pd;
      }
      if (!pd.exact) cert.exact = false;
      if (upper_slack < 0) {
        if (!violated || upper_slack < violated_slack) {
          violated = pd;
          violated_slack = upper_slack;
        }
      } else if (!pd.exact && scaled_slack(lower, gap, lambda, c) < 0 && !open) {
        open = pd;
      }
    }
  }
  if (violated) {
    cert.verdict = Verdict::Violated;
    cert.offending = violated;
  } else if (open) {
    cert.verdict = Verdict::Indeterminate;
    cert.offending = open;
  }
  return cert;
}

}  // namespace detail

// (lambda, c)-quasi-geodesic check over all pairs of path positions.
inline QGCertificate certify_quasi_geodesic(const Ball& ball, const PathRecord& p,
                                            const Rational& lambda, const Rational& c) {
  const int n = static_cast<int>(p.vertices.size());
  return detail::certify_pairs(ball, p.vertices, lambda, c, std::max(0, n - 1),
                               [](int s, int t) { return t - s; });
}

// Same check without a ball, for families with a closed-form distance.
inline QGCertificate certify_quasi_geodesic(const GraphOracle& oracle, const PathRecord& p,
                                            const Rational& lambda, const Rational& c) {
  detail::check_constants(lambda, c);
  if (!p.empty() && !oracle.exact_distance(p.front(), p.front())) {
    throw UnsupportedError(oracle.name() + " has no closed-form distance; certify in a ball");
  }
  QGCertificate cert;
  cert.lambda = lambda;
  cert.c = c;
  std::int64_t worst = std::numeric_limits<std::int64_t>::max();
  const int n = static_cast<int>(p.vertices.size());
  for (int s = 0; s < n; ++s) {
    for (int t = s + 1; t < n; ++t) {
      PairDistance pd{s, t, *oracle.exact_distance(p[s], p[t]), true};
      const auto slack = detail::scaled_slack(pd.d, t - s, lambda, c);
      if (slack < worst) {
        worst = slack;
        cert.worst_pair = pd;
      }
    }
  }
  if (worst < 0) {
    cert.verdict = Verdict::Violated;
    cert.offending = cert.worst_pair;
  }
  return cert;
}

// Exact d(u,v) in the whole graph when it is at most cap: level-by-level
// search from both ends, always growing the smaller side. nullopt if d > cap.
inline std::optional<std::int64_t> bidirectional_distance(const GraphOracle& oracle,
                                                          const VertexKey& u, const VertexKey& v,
                                                          int cap,
                                                          std::size_t budget = default_vertex_budget()) {
  if (u == v) return 0;
  using Map = std::unordered_map<VertexKey, int, VertexKeyHash>;
  std::array<Map, 2> seen{Map{{u, 0}}, Map{{v, 0}}};
  std::array<std::vector<VertexKey>, 2> frontier{std::vector{u}, std::vector{v}};
  std::array<int, 2> level{0, 0};
  while (level[0] + level[1] < cap) {
    const int s = seen[0].size() <= seen[1].size() ? 0 : 1;
    if (frontier[s].empty()) return std::nullopt;  // finite component
    std::vector<VertexKey> next;
    std::optional<std::int64_t> best;
    for (const auto& x : frontier[s]) {
      for (const auto& y : oracle.neighbors(x)) {
        if (seen[s].count(y)) continue;
        seen[s].emplace(y, level[s] + 1);
        next.push_back(y);
        if (auto it = seen[1 - s].find(y); it != seen[1 - s].end()) {
          const std::int64_t d = level[s] + 1 + it->second;
          if (!best || d < *best) best = d;
        }
      }
    }
    if (seen[0].size() + seen[1].size() > budget) {
      throw ResourceError("bidirectional search exceeded the vertex budget", level[0] + level[1]);
    }
    if (best) return best;
    frontier[s].swap(next);
    ++level[s];
  }
  return std::nullopt;
}

// A walk whose ends are exactly its length apart is a geodesic, and so is
// every subpath. Certifies any (lambda, c) without a pairwise pass.
inline std::optional<QGCertificate> geodesic_by_endpoints(const GraphOracle& oracle,
                                                          const PathRecord& p,
                                                          const Rational& lambda,
                                                          const Rational& c) {
  detail::check_constants(lambda, c);
  check_path(oracle, p);
  const int L = p.length();
  if (L == 0 || bidirectional_distance(oracle, p.front(), p.back(), L) != L) return std::nullopt;
  QGCertificate cert;
  cert.lambda = lambda;
  cert.c = c;
  cert.worst_pair = PairDistance{0, L, L, true};
  return cert;
}

// Deterministic shortest path: from u, always step to the least-key neighbour
// that is one closer to v.
inline PathRecord geodesic_between(const Ball& ball, const VertexKey& u, const VertexKey& v) {
  const int iu = ball.at(u), iv = ball.at(v);
  const auto to_v = ball.bfs_from(iv);
  if (to_v[iu] == kUnreached) {
    std::ostringstream os;
    os << "no path from " << u << " to " << v << " inside the ball";
    throw NoPathError(os.str());
  }
  std::vector<VertexKey> out{u};
  int cur = iu;
  while (cur != iv) {
    int best = -1;
    for (int w : ball.neighbors(cur)) {
      if (to_v[w] != to_v[cur] - 1) continue;
      if (best < 0 || ball.key(w) < ball.key(best)) best = w;
    }
    cur = best;
    out.push_back(ball.key(cur));
  }
  return PathRecord(std::move(out));
}

namespace detail {

// Layer-increasing ray from the tiling base: each step goes to the least-key
// neighbour one layer further out, starting from `first`.
inline std::vector<VertexKey> tiling_ray(const GraphOracle& o, VertexKey first, int length) {
  std::vector<VertexKey> ray{o.base()};
  if (length == 0) return ray;
  ray.push_back(std::move(first));
  while (static_cast<int>(ray.size()) <= length) {
    const auto& cur = ray.back();
    std::optional<VertexKey> next;
    for (const auto& w : o.neighbors(cur)) {
      if (w[0] == cur[0] + 1) {
        next = w;
        break;
      }
    }
    if (!next) throw Error("tiling ray stalled");
    ray.push_back(*next);
  }
  return ray;
}

inline PathRecord join_rays(std::vector<VertexKey> minus, const std::vector<VertexKey>& plus) {
  std::reverse(minus.begin(), minus.end());
  minus.insert(minus.end(), plus.begin() + 1, plus.end());
  return PathRecord(std::move(minus));
}

}  // namespace detail

// Bi-infinite geodesic stand-in of length 2*halflength through the base vertex.
// Directions: lattices "x", "y", "z" or "e<i>"; Heisenberg "x" or "y"; free
// groups "a<i>"; trees and tilings "ray". "default" picks the first axis.
inline PathRecord axis_segment(const OraclePtr& oracle, const std::string& direction,
                               int halflength) {
  if (halflength < 0) throw PreconditionError("halflength must be >= 0");
  const auto& o = *oracle;
  auto unsupported = [&] {
    return UnsupportedError("family " + o.name() + " has no axis named '" + direction + "'");
  };
  std::vector<VertexKey> minus{o.base()}, plus{o.base()};
  auto axis_index = [&](int dims) -> int {
    if (direction == "default") return 0;
    if (direction.size() == 1 && direction[0] >= 'x' && direction[0] <= 'z') {
      const int i = direction[0] - 'x';
      if (i < dims) return i;
    }
    if (direction.size() > 1 && direction[0] == 'e') {
      const int i = std::atoi(direction.c_str() + 1) - 1;
      if (i >= 0 && i < dims) return i;
    }
    throw unsupported();
  };

  switch (o.family()) {
    case Family::ZLattice: {
      const int i = axis_index(static_cast<int>(o.base().size()));
      for (int k = 1; k <= halflength; ++k) {
        VertexKey a = o.base(), b = o.base();
        a[i] = -k;
        b[i] = k;
        minus.push_back(a);
        plus.push_back(b);
      }
      break;
    }
    case Family::Heisenberg: {
      // Powers of x, or of y, stay in normal form with c = 0.
      const int i = axis_index(2);
      for (int k = 1; k <= halflength; ++k) {
        VertexKey a{0, 0, 0}, b{0, 0, 0};
        a[i] = -k;
        b[i] = k;
        minus.push_back(a);
        plus.push_back(b);
      }
      break;
    }
    case Family::FreeGroup: {
      int g = 1;
      if (direction != "default") {
        if (direction.size() < 2 || direction[0] != 'a') throw unsupported();
        g = std::atoi(direction.c_str() + 1);
      }
      if (g < 1 || !o.is_valid(VertexKey{g})) throw unsupported();
      VertexKey a, b;
      for (int k = 1; k <= halflength; ++k) {
        a.push_back(-g);
        b.push_back(g);
        minus.push_back(a);
        plus.push_back(b);
      }
      break;
    }
    case Family::RegularTree: {
      if (direction != "default" && direction != "ray") throw unsupported();
      // Alternating words 0101... and 1010... diverge at the root.
      VertexKey a, b;
      for (int k = 1; k <= halflength; ++k) {
        a.push_back((k - 1) % 2);
        b.push_back(k % 2);
        minus.push_back(a);
        plus.push_back(b);
      }
      break;
    }
    case Family::HyperbolicTiling: {
      if (direction != "default" && direction != "ray") throw unsupported();
      if (halflength == 0) break;
      const auto first = o.neighbors(o.base());
      plus = detail::tiling_ray(o, first.front(), halflength);
      // First opposite ray whose far end is 2h from plus's far end; the
      // joined segment is then a geodesic. When the tiling disc needed for
      // that check is over budget, the ray is chosen at the largest
      // halflength that can be checked and the result is left uncertified.
      for (int h = halflength; h >= 1; --h) {
        try {
          const auto near = detail::tiling_ray(o, first.front(), h);
          for (std::size_t k = 1; k < first.size(); ++k) {
            const auto ray = detail::tiling_ray(o, first[k], h);
            if (bidirectional_distance(o, near.back(), ray.back(), 2 * h) == 2 * h) {
              return detail::join_rays(detail::tiling_ray(o, first[k], halflength), plus);
            }
          }
          break;
        } catch (const ResourceError&) {
        }
      }
      throw Error("no geodesic tiling segment of halflength " + std::to_string(halflength) +
                  " through the base found");
    }
    case Family::EdgeList:
      throw unsupported();
  }
  return detail::join_rays(std::move(minus), plus);
}

}  // namespace coarse
