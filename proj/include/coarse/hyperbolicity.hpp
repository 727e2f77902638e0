#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "ball.hpp"

namespace coarse {

// Four-point defect sampled on spheres S(rho), rho = 1..R/2, of a ball of
// radius R. Inside B(2 rho) every ball distance between points of S(rho) is a
// true distance, so each rung is exact for the quadruples it sees.
struct DeltaRung {
  int radius = 0;
  int sphere_size = 0;
  int pool = 0;
  std::int64_t quadruples = 0;
  int twice_delta = 0;  // max over quadruples of (largest - middle pair sum)
  std::array<VertexKey, 4> witness;
  [[nodiscard]] double delta() const { return twice_delta / 2.0; }
};

enum class DeltaTrend { Growing, Plateau };

inline const char* to_string(DeltaTrend t) {
  return t == DeltaTrend::Growing ? "growing" : "plateau";
}

// Artifact conventions, not constants from the theory.
inline constexpr int kDeltaPool = 12;
inline constexpr double kDeltaGrowthSlope = 0.25;

struct HyperbolicityEstimate {
  std::uint64_t seed = 0;
  int sample_count = 0;
  std::vector<DeltaRung> rungs;
  double slope = 0;  // least squares of delta against rho over the upper half
  DeltaTrend trend = DeltaTrend::Plateau;

  [[nodiscard]] double max_delta() const {
    double m = 0;
    for (const auto& r : rungs) m = std::max(m, r.delta());
    return m;
  }
};

namespace detail {

// Portable draws: mt19937_64 output is fixed by the standard, distributions
// are not.
inline std::size_t draw(std::mt19937_64& rng, std::size_t n) { return rng() % n; }

inline int four_point_twice_delta(const std::array<const std::vector<int>*, 4>& d,
                                  const std::array<int, 4>& v) {
  std::array<int, 3> s{(*d[0])[v[1]] + (*d[2])[v[3]], (*d[0])[v[2]] + (*d[1])[v[3]],
                       (*d[0])[v[3]] + (*d[1])[v[2]]};
  std::sort(s.begin(), s.end());
  return s[2] - s[1];
}

inline double slope_of(const std::vector<DeltaRung>& rungs, std::size_t from) {
  const double m = static_cast<double>(rungs.size() - from);
  if (m < 2) return 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = from; k < rungs.size(); ++k) {
    const double x = rungs[k].radius, y = rungs[k].delta();
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace detail

// Per rung: a pool of up to kDeltaPool sphere vertices, then every quadruple
// of the pool if there are at most sample_count of them, else sample_count
// random ones. Trend is growing iff the slope over the upper half of the
// ladder reaches kDeltaGrowthSlope.
inline HyperbolicityEstimate hyperbolicity_estimate(const Ball& ball, int sample_count = 500,
                                                    std::uint64_t seed = 1) {
  if (ball.radius() < 6) throw PreconditionError("hyperbolicity estimate needs ball radius >= 6");
  if (sample_count < 1) throw PreconditionError("sample_count must be positive");
  HyperbolicityEstimate est;
  est.seed = seed;
  est.sample_count = sample_count;
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> spheres(ball.radius() / 2 + 1);
  for (int i = 0; i < ball.size(); ++i) {
    if (ball.depth(i) < static_cast<int>(spheres.size())) spheres[ball.depth(i)].push_back(i);
  }
  for (int rho = 1; rho < static_cast<int>(spheres.size()); ++rho) {
    auto sphere = spheres[rho];
    DeltaRung rung;
    rung.radius = rho;
    rung.sphere_size = static_cast<int>(sphere.size());
    const std::size_t P = std::min<std::size_t>(kDeltaPool, sphere.size());
    for (std::size_t k = 0; k < P; ++k) {
      std::swap(sphere[k], sphere[k + detail::draw(rng, sphere.size() - k)]);
    }
    sphere.resize(P);
    std::sort(sphere.begin(), sphere.end());
    rung.pool = static_cast<int>(P);
    std::vector<std::vector<int>> dist;
    for (int v : sphere) dist.push_back(ball.bfs_from(v));

    auto consider = [&](int a, int b, int c, int d) {
      std::array<const std::vector<int>*, 4> rows{&dist[a], &dist[b], &dist[c], &dist[d]};
      const int td = detail::four_point_twice_delta(rows, {sphere[a], sphere[b], sphere[c], sphere[d]});
      ++rung.quadruples;
      if (td > rung.twice_delta || rung.quadruples == 1) {
        rung.twice_delta = td;
        rung.witness = {ball.key(sphere[a]), ball.key(sphere[b]), ball.key(sphere[c]), ball.key(sphere[d])};
      }
    };
    const int n = static_cast<int>(P);
    const std::int64_t all = n < 4 ? 0 : std::int64_t{n} * (n - 1) * (n - 2) * (n - 3) / 24;
    if (all == 0) {
      // Fewer than four sphere points: no quadruple, defect 0.
    } else if (all <= sample_count) {
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
          for (int c = b + 1; c < n; ++c)
            for (int d = c + 1; d < n; ++d) consider(a, b, c, d);
    } else {
      for (int s = 0; s < sample_count; ++s) {
        std::array<int, 4> q;
        for (int k = 0; k < 4; ++k) {
          do {
            q[k] = static_cast<int>(detail::draw(rng, P));
          } while (std::find(q.begin(), q.begin() + k, q[k]) != q.begin() + k);
        }
        consider(q[0], q[1], q[2], q[3]);
      }
    }
    est.rungs.push_back(rung);
  }
  est.slope = detail::slope_of(est.rungs, est.rungs.size() / 2);
  est.trend = est.slope >= kDeltaGrowthSlope ? DeltaTrend::Growing : DeltaTrend::Plateau;
  return est;
}

}  // namespace coarse
