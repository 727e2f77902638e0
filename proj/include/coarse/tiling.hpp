#pragma once

#include <mutex>
#include <string>
#include <vector>

#include "oracle.hpp"

namespace coarse {

// Combinatorial {p,q} tiling (p-gons, q meeting at every vertex) grown as a
// disc around a base vertex. Growth is append only and proceeds one sphere at
// a time: every vertex at distance k gets its missing faces glued on (in id
// order) before any vertex at distance k+1 is touched. Once sphere k is
// complete, sphere k+1 is exactly the set of unlabelled neighbours of sphere
// k, so the key (layer, index) = (distance from base, rank by creation order
// within the layer) of a vertex never changes once assigned.
class TilingBuilder {
 public:
  TilingBuilder(int p, int q) : p_(p), q_(q) {
    const int k = (p - 2) * (q - 2);
    if (p < 3 || q < 3 || k < 4) {
      throw PreconditionError("{" + std::to_string(p) + "," + std::to_string(q) +
                              "} is spherical (finite); need (p-2)(q-2) >= 4");
    }
    // One p-gon containing the base vertex.
    for (int i = 0; i < p_; ++i) add_vertex();
    for (int i = 0; i < p_; ++i) {
      const int a = i, b = (i + 1) % p_;
      link(a, b);
      next_[a] = b;
      prev_[b] = a;
      faces_[a] = 1;
    }
    label(0, 0);
  }

  [[nodiscard]] int p() const { return p_; }
  [[nodiscard]] int q() const { return q_; }
  [[nodiscard]] std::size_t vertex_count() const { return layer_.size(); }
  [[nodiscard]] int layer_of(int id) const { return layer_[id]; }
  [[nodiscard]] int index_in_layer(int id) const { return index_[id]; }
  [[nodiscard]] bool is_complete(int id) const { return faces_[id] == q_; }
  [[nodiscard]] const std::vector<int>& adjacency(int id) const { return adj_[id]; }

  // Every vertex of the given layer gets all q neighbours; afterwards layer+1
  // is fully labelled.
  void complete_layer(int layer) {
    while (completed_ < layer) {
      const int k = completed_ + 1;
      // A layer is ~2.6x the disc inside it, so stop well short of the budget.
      if (vertex_count() > default_vertex_budget() / 8) {
        throw ResourceError("tiling disc holds " + std::to_string(vertex_count()) +
                                " vertices; refusing to grow layer " + std::to_string(k + 1),
                            k);
      }
      for (int v : spheres_[k]) {
        while (faces_[v] < q_) add_face(v);
      }
      for (int v : spheres_[k]) {
        for (int w : adj_[v]) {
          if (layer_[w] < 0) label(w, k + 1);
        }
      }
      completed_ = k;
    }
  }

  [[nodiscard]] int layer_size(int layer) {
    if (layer < 0) return 0;
    complete_layer(layer - 1);
    return static_cast<int>(spheres_[layer].size());
  }

  [[nodiscard]] int id_of(int layer, int index) {
    if (layer < 0 || index < 0) return -1;
    if (index >= layer_size(layer)) return -1;
    return spheres_[layer][index];
  }

 private:
  int add_vertex() {
    const int id = static_cast<int>(layer_.size());
    layer_.push_back(-1);
    index_.push_back(-1);
    faces_.push_back(0);
    next_.push_back(-1);
    prev_.push_back(-1);
    adj_.emplace_back();
    return id;
  }

  void label(int id, int layer) {
    if (static_cast<int>(spheres_.size()) <= layer) spheres_.resize(layer + 1);
    layer_[id] = layer;
    index_[id] = static_cast<int>(spheres_[layer].size());
    spheres_[layer].push_back(id);
  }

  void link(int a, int b) {
    for (int x : adj_[a]) {
      if (x == b) throw Error("tiling construction produced a double edge");
    }
    adj_[a].push_back(b);
    adj_[b].push_back(a);
  }

  // Glues one new face onto the exterior edge (v, next(v)), absorbing the
  // neighbouring boundary edges of any vertex the face saturates.
  void add_face(int v) {
    int a = v;
    int m = 1;
    if (faces_[v] == q_ - 1) {
      a = prev_[v];
      ++m;
      while (faces_[a] == q_ - 1) {
        a = prev_[a];
        ++m;
      }
    }
    int b = next_[v];
    while (faces_[b] == q_ - 1) {
      b = next_[b];
      ++m;
    }
    if (a == b) throw Error("tiling construction closed up: boundary exhausted");
    const int fresh = p_ - m - 1;
    if (fresh < 0) throw Error("tiling construction: boundary chain longer than a face");

    // Interior chain vertices become saturated and leave the boundary.
    for (int x = next_[a]; x != b; x = next_[x]) ++faces_[x];
    ++faces_[a];
    ++faces_[b];

    int last = a;
    for (int i = 0; i < fresh; ++i) {
      const int n = add_vertex();
      faces_[n] = 1;
      link(last, n);
      next_[last] = n;
      prev_[n] = last;
      last = n;
    }
    link(last, b);
    next_[last] = b;
    prev_[b] = last;
  }

  int p_, q_;
  int completed_ = -1;
  std::vector<int> layer_;
  std::vector<int> index_;
  std::vector<std::vector<int>> spheres_;
  std::vector<int> faces_;
  std::vector<int> next_, prev_;
  std::vector<std::vector<int>> adj_;
};

// Lazy oracle over a TilingBuilder. Vertices are (layer, index) pairs; the base
// vertex is (0,0).
class TilingOracle final : public GraphOracle {
 public:
  TilingOracle(int p, int q) : builder_(p, q) {}

  [[nodiscard]] int p() const { return builder_.p(); }
  [[nodiscard]] int q() const { return builder_.q(); }

  Family family() const override { return Family::HyperbolicTiling; }
  std::string name() const override {
    return "tiling-" + std::to_string(builder_.p()) + "-" + std::to_string(builder_.q());
  }
  int degree_bound() const override { return builder_.q(); }
  VertexKey base() const override { return {0, 0}; }
  std::string canonical_form() const override {
    return "(layer, index) pair of an existing tiling vertex";
  }
  bool is_valid(const VertexKey& v) const override {
    if (v.size() != 2) return false;
    std::lock_guard lock(mutex_);
    return builder_.id_of(v[0], v[1]) >= 0;
  }
  [[nodiscard]] bool is_euclidean() const { return (p() - 2) * (q() - 2) == 4; }

 protected:
  std::vector<VertexKey> raw_neighbors(const VertexKey& v) const override {
    std::lock_guard lock(mutex_);
    const int id = builder_.id_of(v[0], v[1]);
    builder_.complete_layer(v[0]);
    std::vector<VertexKey> out;
    for (int w : builder_.adjacency(id)) {
      out.push_back({builder_.layer_of(w), builder_.index_in_layer(w)});
    }
    return out;
  }

 private:
  mutable std::mutex mutex_;
  mutable TilingBuilder builder_;
};

}  // namespace coarse
