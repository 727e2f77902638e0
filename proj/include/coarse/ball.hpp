#pragma once

#include <cstdint>
#include <cstdlib>
#include <deque>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "families.hpp"

namespace coarse {

inline constexpr int kUnreached = -1;

// Induced subgraph on every vertex within `radius` of `center`, with BFS
// labels. Immutable once built; vertices are indexed 0..size()-1 in BFS
// order with ties broken by key order within each layer.
class Ball {
 public:
  [[nodiscard]] const OraclePtr& oracle() const { return oracle_; }
  [[nodiscard]] const VertexKey& center() const { return center_; }
  [[nodiscard]] int radius() const { return radius_; }
  [[nodiscard]] int size() const { return static_cast<int>(vertices_.size()); }

  [[nodiscard]] const VertexKey& key(int i) const { return vertices_[i]; }
  [[nodiscard]] const std::vector<VertexKey>& keys() const { return vertices_; }
  [[nodiscard]] int depth(int i) const { return dist_[i]; }
  [[nodiscard]] const std::vector<int>& depths() const { return dist_; }
  [[nodiscard]] bool on_boundary(int i) const { return dist_[i] == radius_; }

  [[nodiscard]] std::span<const int> neighbors(int i) const {
    return {targets_.data() + offsets_[i], targets_.data() + offsets_[i + 1]};
  }

  [[nodiscard]] std::optional<int> find(const VertexKey& k) const {
    auto it = index_.find(k);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  [[nodiscard]] bool contains(const VertexKey& k) const { return index_.count(k) != 0; }
  [[nodiscard]] int at(const VertexKey& k) const {
    if (auto i = find(k)) return *i;
    std::ostringstream os;
    os << "vertex " << k << " is outside the ball of radius " << radius_ << " around "
       << center_;
    throw OutOfBallError(os.str());
  }

  // Ball-restricted BFS from a set of sources. Vertices with allowed[i]==0 are
  // never entered (sources are always entered). Stops at max_depth.
  [[nodiscard]] std::vector<int> bfs(std::span<const int> sources,
                                     int max_depth = std::numeric_limits<int>::max(),
                                     const std::vector<char>* allowed = nullptr) const {
    std::vector<int> d(vertices_.size(), kUnreached);
    std::vector<int> frontier;
    for (int s : sources) {
      if (d[s] == kUnreached) {
        d[s] = 0;
        frontier.push_back(s);
      }
    }
    std::vector<int> next;
    for (int level = 0; !frontier.empty() && level < max_depth; ++level) {
      next.clear();
      for (int u : frontier) {
        for (int w : neighbors(u)) {
          if (d[w] != kUnreached) continue;
          if (allowed && !(*allowed)[w]) continue;
          d[w] = level + 1;
          next.push_back(w);
        }
      }
      frontier.swap(next);
    }
    return d;
  }

  [[nodiscard]] std::vector<int> bfs_from(int source,
                                          int max_depth = std::numeric_limits<int>::max()) const {
    const int s[] = {source};
    return bfs(s, max_depth);
  }

  friend Ball materialize_ball(OraclePtr oracle, const VertexKey& center, int radius,
                               std::size_t budget);

 private:
  OraclePtr oracle_;
  VertexKey center_;
  int radius_ = 0;
  std::vector<VertexKey> vertices_;
  std::vector<int> dist_;
  std::vector<int> offsets_;
  std::vector<int> targets_;
  std::unordered_map<VertexKey, int, VertexKeyHash> index_;
};

// Exact BFS ball. Throws ResourceError carrying the largest complete radius if
// the ball would exceed `budget` vertices.
inline Ball materialize_ball(OraclePtr oracle, const VertexKey& center, int radius,
                             std::size_t budget = default_vertex_budget()) {
  if (radius < 0) throw PreconditionError("ball radius must be >= 0");
  oracle->validate(center);
  if (auto* el = dynamic_cast<const EdgeListOracle*>(oracle.get());
      el && radius > el->trust_radius()) {
    throw PreconditionError("radius " + std::to_string(radius) +
                            " exceeds the edge list's boundary-trust radius " +
                            std::to_string(el->trust_radius()));
  }
  Ball ball;
  ball.oracle_ = oracle;
  ball.center_ = center;
  ball.radius_ = radius;
  ball.vertices_.push_back(center);
  ball.dist_.push_back(0);
  ball.index_.emplace(center, 0);

  std::vector<std::vector<int>> adj(1);
  std::size_t layer_begin = 0;
  for (int level = 0; level <= radius; ++level) {
    const std::size_t layer_end = ball.vertices_.size();
    std::vector<VertexKey> fresh;
    for (std::size_t i = layer_begin; i < layer_end; ++i) {
      for (const auto& w : oracle->neighbors(ball.vertices_[i])) {
        if (auto it = ball.index_.find(w); it != ball.index_.end()) {
          adj[i].push_back(it->second);
        } else if (level < radius) {
          fresh.push_back(w);
        }
      }
    }
    if (level == radius) break;
    std::sort(fresh.begin(), fresh.end());
    fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
    if (ball.vertices_.size() + fresh.size() > budget) {
      throw ResourceError("ball around " + oracle->name() + " exceeds vertex budget " +
                              std::to_string(budget) + " at radius " +
                              std::to_string(level + 1),
                          level);
    }
    for (auto& w : fresh) {
      ball.index_.emplace(w, static_cast<int>(ball.vertices_.size()));
      ball.vertices_.push_back(std::move(w));
      ball.dist_.push_back(level + 1);
      adj.emplace_back();
    }
    layer_begin = layer_end;
  }
  // Edges from layer L to layer L+1 were only recorded on the far side.
  for (std::size_t i = 0; i < adj.size(); ++i) {
    for (int j : adj[i]) {
      if (ball.dist_[j] < ball.dist_[i]) adj[j].push_back(static_cast<int>(i));
    }
  }
  ball.offsets_.reserve(adj.size() + 1);
  ball.offsets_.push_back(0);
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    ball.targets_.insert(ball.targets_.end(), a.begin(), a.end());
    ball.offsets_.push_back(static_cast<int>(ball.targets_.size()));
  }
  return ball;
}

inline Ball materialize_ball(OraclePtr oracle, int radius,
                             std::size_t budget = default_vertex_budget()) {
  const auto c = oracle->base();
  return materialize_ball(std::move(oracle), c, radius, budget);
}

}  // namespace coarse
