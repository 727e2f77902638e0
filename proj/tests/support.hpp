#pragma once

// Fixtures and brute-force oracles shared by the unit tests and the
// acceptance binary.

#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "coarse/coarse.hpp"

namespace testsupport {

using namespace coarse;

inline PathRecord pts(std::vector<std::pair<int, int>> xy) {
  std::vector<VertexKey> vs;
  for (auto [x, y] : xy) vs.push_back({x, y});
  return PathRecord(vs);
}

// Lattice walk through the given corners with axis-parallel legs.
inline PathRecord polyline(std::vector<std::pair<int, int>> corners) {
  std::vector<std::pair<int, int>> out{corners.front()};
  for (std::size_t i = 1; i < corners.size(); ++i) {
    auto [x, y] = out.back();
    auto [tx, ty] = corners[i];
    while (x != tx) out.push_back({x += (tx > x ? 1 : -1), y});
    while (y != ty) out.push_back({x, y += (ty > y ? 1 : -1)});
  }
  return pts(out);
}

// Every cyclic subpath of length <= n/2 checked as a quasi-geodesic on its
// own, distances from a fresh BFS per vertex.
inline bool brute_force_quasi_circle(const Ball& ball, const PathRecord& loop, const Rational& lambda,
                                     const Rational& c) {
  const int n = loop.length();
  std::map<VertexKey, std::vector<int>> bfs;
  for (int i = 0; i < n; ++i) {
    if (!bfs.count(loop[i])) bfs[loop[i]] = ball.bfs_from(ball.at(loop[i]));
  }
  for (int s = 0; s < n; ++s) {
    for (int len = 1; len <= n / 2; ++len) {
      for (int i = 0; i <= len; ++i) {
        for (int j = i + 1; j <= len; ++j) {
          const auto& a = loop[(s + i) % n];
          const auto& b = loop[(s + j) % n];
          const int d = bfs[a][ball.at(b)];
          if (Rational(d) < Rational(j - i) / lambda - c) return false;
        }
      }
    }
  }
  return true;
}

// Random walk out from the centre, closed by a geodesic back.
inline PathRecord random_loop(const Ball& ball, std::mt19937_64& rng, int max_walk) {
  std::vector<VertexKey> walk{ball.key(0)};
  const int steps = 1 + static_cast<int>(rng() % max_walk);
  for (int k = 0; k < steps; ++k) {
    auto nb = ball.neighbors(ball.at(walk.back()));
    walk.push_back(ball.key(nb[rng() % nb.size()]));
  }
  auto back = geodesic_between(ball, walk.back(), walk.front());
  return as_loop(concat(PathRecord(walk), back));
}

struct Quad {
  PathRecord g1, g2, p1, p2, alpha;
};

// Rays along +-x from the origin to +-t, drops of length d, chord at -d.
inline Quad z2_quad(int t1, int t2, int d) {
  return {polyline({{0, 0}, {t1, 0}}), polyline({{0, 0}, {-t2, 0}}),
          polyline({{t1, 0}, {t1, -d}}), polyline({{-t2, 0}, {-t2, -d}}),
          polyline({{t1, -d}, {-t2, -d}})};
}

// Ray from the origin with a 0 -> 1 -> 0 excursion in the perpendicular
// direction over [a, b].
inline PathRecord bumped_ray(int dx, int dy, int a, int b, int H) {
  const int px = dy, py = -dx;
  return polyline({{0, 0}, {a * dx, a * dy}, {a * dx + px, a * dy + py},
                   {b * dx + px, b * dy + py}, {b * dx, b * dy}, {H * dx, H * dy}});
}

// Ray with a single step back at distance 5.
inline PathRecord backtracked_ray(int dx, int dy, int H) {
  std::vector<std::pair<int, int>> v;
  for (int t = 0; t <= 5; ++t) v.push_back({t * dx, t * dy});
  for (int t = 4; t <= H; ++t) v.push_back({t * dx, t * dy});
  return pts(v);
}

inline PathRecord drop_front(const PathRecord& p, int k) { return p.slice(k, p.length()); }

inline PathRecord extended(PathRecord p, std::pair<int, int> v) {
  p.vertices.push_back({v.first, v.second});
  return p;
}

struct Mutation {
  const char* name;
  int axiom;
  std::function<void(CrossExaminer&)> apply;
};

// Five single-axiom breakages of the canonical Z^2 cross-examiner per axiom.
inline std::vector<Mutation> ce_mutations(int H = 80) {
  return {
      // CE1
      {"gamma1 backtrack", 1, [H](auto& ce) { ce.gamma[0] = backtracked_ray(0, 1, H); }},
      {"gamma2 backtrack", 1, [H](auto& ce) { ce.gamma[1] = backtracked_ray(-1, 0, H); }},
      {"gamma3 backtrack", 1, [H](auto& ce) { ce.gamma[2] = backtracked_ray(1, 0, H); }},
      {"gamma3 bump", 1, [H](auto& ce) { ce.gamma[2] = bumped_ray(1, 0, 4, 7, H - 2); }},
      {"gamma1 bump", 1, [H](auto& ce) { ce.gamma[0] = bumped_ray(0, 1, 4, 7, H - 2); }},
      // CE2
      {"w1 off rho", 2, [](auto& ce) { ce.w[0] = drop_front(ce.w[0], 1); }},
      {"w2 off rho", 2, [](auto& ce) { ce.w[1] = drop_front(ce.w[1], 2); }},
      {"w3 off rho", 2, [](auto& ce) { ce.w[2] = drop_front(ce.w[2], 2); }},
      {"w1 beyond q, right", 2, [](auto& ce) { ce.w[0] = polyline({{60, 0}, {60, -20}}); }},
      {"w1 beyond q, left", 2, [](auto& ce) { ce.w[0] = polyline({{-60, 0}, {-60, -20}}); }},
      // CE3
      {"w1 beside gamma1", 3, [](auto& ce) { ce.w[0] = polyline({{0, 0}, {0, 25}}); }},
      {"w1 up-left", 3, [](auto& ce) { ce.w[0] = detail::z2_diagonal(-1, 1, 25); }},
      {"w2 down", 3, [](auto& ce) { ce.w[1] = polyline({{0, 0}, {0, -25}}); }},
      {"w2 down-right", 3, [](auto& ce) { ce.w[1] = detail::z2_diagonal(1, -1, 25); }},
      {"w3 down", 3, [](auto& ce) { ce.w[2] = polyline({{0, 0}, {0, -25}}); }},
      // CE4
      {"w1 shallow right", 4, [](auto& ce) { ce.w[0] = polyline({{0, 0}, {0, -5}, {20, -5}, {20, -60}}); }},
      {"w1 shallow left", 4, [](auto& ce) { ce.w[0] = polyline({{0, 0}, {0, -5}, {-20, -5}, {-20, -60}}); }},
      {"w2 shallow", 4,
       [](auto& ce) {
         auto d = detail::z2_diagonal(1, 1, 10).vertices;
         auto tail = polyline({{5, 5}, {30, 5}, {30, 50}}).vertices;
         d.insert(d.end(), tail.begin() + 1, tail.end());
         ce.w[1] = PathRecord(d);
       }},
      {"w3 shallow", 4,
       [](auto& ce) {
         auto d = detail::z2_diagonal(-1, 1, 10).vertices;
         auto tail = polyline({{-5, 5}, {-30, 5}, {-30, 50}}).vertices;
         d.insert(d.end(), tail.begin() + 1, tail.end());
         ce.w[2] = PathRecord(d);
       }},
      {"r too small", 4, [](auto& ce) { ce.r = 15; }},
      // CE5
      {"q1 over the top", 5, [](auto& ce) { ce.q[0] = detail::l1_arc(32, 0, 2).reversed(); }},
      {"q2 reversed", 5, [](auto& ce) { ce.q[1] = ce.q[1].reversed(); }},
      {"q3 misses gamma2", 5, [](auto& ce) { ce.q[2] = extended(ce.q[2], {-40, -1}); }},
      {"q2 long way", 5, [](auto& ce) { ce.q[1] = detail::l1_arc(40, 1, 3).reversed(); }},
      {"q3 long way", 5, [](auto& ce) { ce.q[2] = detail::l1_arc(40, 2, 3).reversed(); }},
      // CE6
      {"q1 too close", 6, [](auto& ce) { ce.q[0] = detail::l1_arc(20, 2, 2); }},
      {"q2 too far", 6, [](auto& ce) { ce.q[1] = detail::l1_arc(55, 0, 1); }},
      {"R too small", 6, [](auto& ce) { ce.R = 45; }},
      {"q3 too close", 6, [](auto& ce) { ce.q[2] = detail::l1_arc(25, 1, 1); }},
      {"q1 too far", 6, [](auto& ce) { ce.q[0] = detail::l1_arc(51, 2, 2); }},
  };
}

// Any window [s, e] between two distinct reds that skips the third green and
// meets the third red.
inline bool brute_good_subpath_exists(const DeltaPath& dp) {
  const int n = static_cast<int>(dp.size());
  for (int s = 0; s < n; ++s) {
    for (int e = s + 1; e < n; ++e) {
      const int a = dp[s], b = dp[e];
      if (a >= 3 || b >= 3 || a == b) continue;
      const int c = 3 - a - b;
      bool ok = true, third = false;
      for (int k = s; k <= e; ++k) {
        ok = ok && dp[k] != 3 + c;
        third = third || dp[k] == c;
      }
      if (ok && third) return true;
    }
  }
  return false;
}

// Ragged detours above (sign > 0) or below the x axis between -a and b,
// heights kept in [13, 30].
inline PathRecord ragged_detour(std::mt19937_64& rng) {
  const int a = 12 + static_cast<int>(rng() % 20), b = 12 + static_cast<int>(rng() % 20);
  const int sign = rng() % 2 ? 1 : -1;
  int h = 13 + static_cast<int>(rng() % 15);
  std::vector<std::pair<int, int>> corners{{-a, 0}, {-a, sign * h}};
  for (int x = -a + 4; x < b; x += 4) {
    h = std::clamp(h + static_cast<int>(rng() % 7) - 3, 13, 30);
    corners.push_back({x, corners.back().second});
    corners.push_back({x, sign * h});
  }
  corners.push_back({b, sign * h});
  corners.push_back({b, 0});
  return polyline(corners);
}

}  // namespace testsupport
