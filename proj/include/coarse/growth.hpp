#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "metric.hpp"

namespace coarse {

struct ExponentFit {
  int n1 = 0, n2 = 0;
  double slope = 0;      // least squares, log G against log n
  double residual = 0;   // rms of that fit
  double log_linear_residual = 0;  // rms of log G against n
  double min_ratio = 0;  // min G(n+1)/G(n) over the window
  bool super_polynomial = false;
};

struct GrowthTable {
  std::string family;
  std::vector<std::int64_t> values;  // values[n] = |B(n)|
  int requested = 0;
  bool partial = false;  // budget hit before `requested`
  ExponentFit fit;

  [[nodiscard]] int attained() const { return static_cast<int>(values.size()) - 1; }
  [[nodiscard]] std::int64_t operator()(int n) const { return values.at(n); }

  [[nodiscard]] std::string csv() const {
    std::ostringstream os;
    os << "n,count\n";
    for (std::size_t n = 0; n < values.size(); ++n) os << n << ',' << values[n] << '\n';
    return os.str();
  }
};

// A ratio test alone confuses n^4 at n ~ 10 with exponential growth, so the
// detector also asks that log G be closer to linear in n than in log n.
inline constexpr double kSuperPolynomialRatio = 1.25;

inline ExponentFit fit_exponent(const std::vector<std::int64_t>& values, int n1, int n2) {
  if (n1 < 1 || n2 <= n1 || n2 >= static_cast<int>(values.size())) {
    throw PreconditionError("fit window [" + std::to_string(n1) + "," + std::to_string(n2) +
                            "] needs 1 <= n1 < n2 <= " + std::to_string(values.size() - 1));
  }
  auto least_squares = [&](auto xf) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int m = n2 - n1 + 1;
    for (int n = n1; n <= n2; ++n) {
      const double x = xf(n), y = std::log(static_cast<double>(values[n]));
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double icept = (sy - slope * sx) / m;
    double ss = 0;
    for (int n = n1; n <= n2; ++n) {
      const double e = std::log(static_cast<double>(values[n])) - (slope * xf(n) + icept);
      ss += e * e;
    }
    return std::pair{slope, std::sqrt(ss / m)};
  };
  ExponentFit f;
  f.n1 = n1, f.n2 = n2;
  std::tie(f.slope, f.residual) = least_squares([](int n) { return std::log(double(n)); });
  f.log_linear_residual = least_squares([](int n) { return double(n); }).second;
  f.min_ratio = std::numeric_limits<double>::infinity();
  for (int n = n1; n < n2; ++n) {
    f.min_ratio = std::min(f.min_ratio, double(values[n + 1]) / double(values[n]));
  }
  f.super_polynomial = f.min_ratio >= kSuperPolynomialRatio && f.log_linear_residual < f.residual;
  return f;
}

// Exact |B(n)| for n = 0..N by sphere-to-sphere BFS. Only three spheres are
// held at once; the budget caps |B(n)| like it does for balls. Default fit
// window is [ceil(N/4), N].
inline GrowthTable growth_table(const OraclePtr& oracle, int N,
                                std::optional<std::pair<int, int>> window = std::nullopt,
                                std::size_t budget = default_vertex_budget()) {
  if (N < 0) throw PreconditionError("growth table needs N >= 0");
  GrowthTable t;
  t.family = oracle->name();
  t.requested = N;
  std::unordered_set<VertexKey, VertexKeyHash> prev, cur{oracle->base()}, next;
  t.values.push_back(1);
  for (int n = 1; n <= N; ++n) {
    next.clear();
    try {
      for (const auto& v : cur) {
        for (const auto& w : oracle->neighbors(v)) {
          if (!prev.count(w) && !cur.count(w)) next.insert(w);
        }
      }
    } catch (const ResourceError&) {  // the oracle's own budget
      t.partial = true;
      break;
    }
    if (static_cast<std::size_t>(t.values.back()) + next.size() > budget) {
      t.partial = true;
      break;
    }
    t.values.push_back(t.values.back() + static_cast<std::int64_t>(next.size()));
    prev.swap(cur);
    cur.swap(next);
  }
  const int top = t.attained();
  if (window) {
    t.fit = fit_exponent(t.values, window->first, std::min(window->second, top));
  } else if (top >= 2) {
    t.fit = fit_exponent(t.values, std::min(std::max(1, (top + 3) / 4), top - 1), top);
  }
  return t;
}

// phi(lambda) = min { n : G(n) > lambda }.
inline int inverse_growth_phi(const GrowthTable& table, std::int64_t lambda) {
  auto it = std::upper_bound(table.values.begin(), table.values.end(), lambda);
  if (it == table.values.end()) {
    throw PreconditionError("growth table exhausted: G(" + std::to_string(table.attained()) +
                            ") = " + std::to_string(table.values.back()) + " <= " +
                            std::to_string(lambda));
  }
  return static_cast<int>(it - table.values.begin());
}

// Vertices at distance exactly 1 from A, straight from the oracle.
inline std::vector<VertexKey> vertex_boundary(const GraphOracle& oracle,
                                              const std::vector<VertexKey>& A) {
  std::unordered_set<VertexKey, VertexKeyHash> in(A.begin(), A.end());
  std::vector<VertexKey> out;
  for (const auto& a : A) {
    for (const auto& w : oracle.neighbors(a)) {
      if (!in.count(w)) out.push_back(w);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct IsoperimetricSample {
  std::int64_t size = 0;
  std::int64_t boundary = 0;
  int phi = 0;  // phi(2|A|)
  bool passes = false;

  // |A| / phi(2|A|) <= 4 |dA|, cleared of the division.
  [[nodiscard]] std::int64_t lhs() const { return size; }
  [[nodiscard]] std::int64_t rhs() const { return 4 * boundary * phi; }
};

namespace detail {

inline bool connected_within(const Ball& ball, const std::vector<int>& members) {
  if (members.empty()) return true;
  std::vector<char> allowed(ball.size(), 0);
  for (int v : members) allowed[v] = 1;
  const int src[] = {members.front()};
  auto d = ball.bfs(src, std::numeric_limits<int>::max(), &allowed);
  return std::all_of(members.begin(), members.end(), [&](int v) { return d[v] != kUnreached; });
}

}  // namespace detail

// Needs A connected and clear of the rim so that every neighbour of A is in
// the ball.
inline IsoperimetricSample varopoulos_check(const Ball& ball, const std::vector<int>& A,
                                            const GrowthTable& table) {
  if (A.empty()) throw PreconditionError("isoperimetric sample needs a nonempty set");
  std::vector<char> in(ball.size(), 0);
  for (int v : A) {
    if (ball.on_boundary(v)) {
      std::ostringstream os;
      os << "set touches the ball boundary at " << ball.key(v) << "; its boundary is not exact";
      throw PreconditionError(os.str());
    }
    in[v] = 1;
  }
  std::vector<int> members;
  for (int v = 0; v < ball.size(); ++v) {
    if (in[v]) members.push_back(v);
  }
  if (!detail::connected_within(ball, members)) {
    throw PreconditionError("isoperimetric sample is not connected");
  }
  std::vector<char> seen(ball.size(), 0);
  IsoperimetricSample s;
  s.size = static_cast<std::int64_t>(members.size());
  for (int v : members) {
    for (int w : ball.neighbors(v)) {
      if (!in[w] && !seen[w]) {
        seen[w] = 1;
        ++s.boundary;
      }
    }
  }
  s.phi = inverse_growth_phi(table, 2 * s.size);
  s.passes = s.lhs() <= s.rhs();
  return s;
}

enum class SetShape { TreeTruncation, Percolation };

// Connected sets in the interior of the ball (depth < radius).
// TreeTruncation: first `size` vertices of a BFS from a random root with
// shuffled neighbour order. Percolation: open cluster of a random root under
// site percolation at a random p in [0.5, 0.9], capped at `size`.
inline std::vector<int> random_connected_set(const Ball& ball, int size, std::mt19937_64& rng,
                                             SetShape shape) {
  if (ball.radius() < 1) throw PreconditionError("random sets need a ball of radius >= 1");
  std::vector<int> interior;
  for (int v = 0; v < ball.size(); ++v) {
    if (ball.depth(v) < ball.radius()) interior.push_back(v);
  }
  const int root = interior[rng() % interior.size()];
  std::vector<char> allowed(ball.size(), 0);
  for (int v : interior) allowed[v] = 1;
  if (shape == SetShape::Percolation) {
    std::uniform_real_distribution<double> pd(0.5, 0.9);
    const double p = pd(rng);
    std::bernoulli_distribution open(p);
    for (int v : interior) allowed[v] = allowed[v] && open(rng);
    allowed[root] = 1;
  }
  std::vector<char> taken(ball.size(), 0);
  std::vector<int> out{root}, nb;
  taken[root] = 1;
  for (std::size_t head = 0; head < out.size() && static_cast<int>(out.size()) < size; ++head) {
    auto span = ball.neighbors(out[head]);
    nb.assign(span.begin(), span.end());
    std::shuffle(nb.begin(), nb.end(), rng);
    for (int w : nb) {
      if (!allowed[w] || taken[w] || static_cast<int>(out.size()) >= size) continue;
      taken[w] = 1;
      out.push_back(w);
    }
  }
  return out;
}

struct VaropoulosSweep {
  std::string family;
  int R = 0, samples = 0, max_size = 0;
  std::uint64_t seed = 0;
  int failures = 0;
  std::optional<int> first_failure;  // sample index
  double max_ratio = 0;              // max of lhs / rhs
  [[nodiscard]] bool all_pass() const { return failures == 0; }
};

// `samples` random connected sets of size 1..max_size in B(R), alternating
// tree truncation and percolation shapes.
inline VaropoulosSweep varopoulos_sweep(const OraclePtr& oracle, int R, int samples,
                                        std::uint64_t seed, int max_size = 300) {
  if (R < 2 || samples < 1 || max_size < 1) {
    throw PreconditionError("varopoulos sweep needs R >= 2, samples >= 1, max_size >= 1");
  }
  VaropoulosSweep out;
  out.family = oracle->name();
  out.R = R;
  out.samples = samples;
  out.max_size = max_size;
  out.seed = seed;
  const auto ball = materialize_ball(oracle, R);
  const auto table = growth_table(oracle, R + 4);
  std::mt19937_64 rng(seed);
  for (int k = 0; k < samples; ++k) {
    const auto shape = k % 2 ? SetShape::Percolation : SetShape::TreeTruncation;
    const int size = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_size));
    const auto s = varopoulos_check(ball, random_connected_set(ball, size, rng, shape), table);
    out.max_ratio = std::max(out.max_ratio, double(s.lhs()) / double(s.rhs()));
    if (!s.passes) {
      ++out.failures;
      if (!out.first_failure) out.first_failure = k;
    }
  }
  return out;
}

struct RegionSample {
  std::vector<VertexKey> A;
  int depth = 0;
};

struct QuadGrowthRow {
  std::int64_t size = 0;
  std::int64_t boundary = 0;
  int depth = 0;
  bool holds = false;  // depth > |dA|/K - K
};

struct QuadGrowthCertificate {
  Rational K;
  std::vector<QuadGrowthRow> rows;
  bool holds = false;
};

// Finite shadow of the quadratic growth criterion: boundaries must strictly
// increase and every sample must satisfy the depth inequality.
inline QuadGrowthCertificate quad_growth_certificate(const GraphOracle& oracle,
                                                     const std::vector<RegionSample>& samples,
                                                     const Rational& K) {
  if (K <= 0) throw PreconditionError("K must be positive");
  if (samples.size() < 2) {
    throw PreconditionError("malformed family: need at least two samples with increasing boundary");
  }
  QuadGrowthCertificate cert;
  cert.K = K;
  cert.holds = true;
  for (const auto& s : samples) {
    QuadGrowthRow row;
    row.size = static_cast<std::int64_t>(s.A.size());
    row.boundary = static_cast<std::int64_t>(vertex_boundary(oracle, s.A).size());
    row.depth = s.depth;
    if (!cert.rows.empty() && row.boundary <= cert.rows.back().boundary) {
      throw PreconditionError("malformed family: boundary sizes must strictly increase (" +
                              std::to_string(cert.rows.back().boundary) + " then " +
                              std::to_string(row.boundary) + ")");
    }
    row.holds = Rational(row.depth) > Rational(row.boundary) / K - K;
    cert.holds = cert.holds && row.holds;
    cert.rows.push_back(row);
  }
  return cert;
}

struct RayRegionRow {
  int d = 0;
  std::int64_t size = 0;
  int dist_to_base = 0;
  std::array<bool, 3> meets{};
  bool clause1 = false, clause2 = false, clause3 = false;
  [[nodiscard]] bool ok() const { return clause1 && clause2 && clause3; }
};

struct RayRegionAudit {
  Rational K;
  bool increasing = false;
  std::vector<RayRegionRow> rows;
  // First failing (sample, clause); clause 0 means d_n not strictly increasing.
  std::optional<std::pair<int, int>> first_failure;
  [[nodiscard]] bool hypotheses_met() const { return !first_failure; }
};

// Audits the three numbered hypotheses for each Z_n. The conclusion itself is
// not checked.
inline RayRegionAudit ray_region_harness(const Ball& ball, const VertexKey& v0,
                                    const std::array<PathRecord, 3>& gammas,
                                    const std::vector<std::vector<VertexKey>>& Z,
                                    const std::vector<int>& d, const Rational& K) {
  if (Z.size() != d.size() || Z.empty()) {
    throw PreconditionError("need one d_n per Z_n and at least one sample");
  }
  if (K <= 0) throw PreconditionError("K must be positive");
  RayRegionAudit audit;
  audit.K = K;
  audit.increasing = std::adjacent_find(d.begin(), d.end(), std::greater_equal<>()) == d.end();
  if (!audit.increasing) audit.first_failure = std::pair{0, 0};
  const auto from_base = ball.bfs_from(ball.at(v0));
  std::array<std::unordered_set<VertexKey, VertexKeyHash>, 3> on_gamma;
  for (int i = 0; i < 3; ++i) on_gamma[i].insert(gammas[i].vertices.begin(), gammas[i].vertices.end());
  for (std::size_t n = 0; n < Z.size(); ++n) {
    std::vector<int> idx;
    for (const auto& k : Z[n]) idx.push_back(ball.at(k));
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    if (!detail::connected_within(ball, idx)) {
      throw PreconditionError("Z_" + std::to_string(n) + " is not connected");
    }
    RayRegionRow row;
    row.d = d[n];
    row.size = static_cast<std::int64_t>(idx.size());
    row.dist_to_base = std::numeric_limits<int>::max();
    for (int v : idx) {
      row.dist_to_base = std::min(row.dist_to_base, from_base[v]);
      for (int i = 0; i < 3; ++i) row.meets[i] = row.meets[i] || on_gamma[i].count(ball.key(v));
    }
    row.clause1 = row.meets[0] && row.meets[1] && row.meets[2];
    row.clause2 = Rational(row.size) < K * row.d + K;
    row.clause3 = Rational(row.dist_to_base) > Rational(row.d) / K - K;
    if (!audit.first_failure && !row.ok()) {
      audit.first_failure = std::pair{static_cast<int>(n), !row.clause1 ? 1 : !row.clause2 ? 2 : 3};
    }
    audit.rows.push_back(row);
  }
  return audit;
}

}  // namespace coarse
