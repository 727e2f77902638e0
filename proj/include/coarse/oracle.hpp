#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "vertex_key.hpp"

namespace coarse {

inline constexpr std::size_t kDefaultVertexBudget = 20'000'000;

// Default per-ball vertex budget; COARSE_PLANE_BUDGET overrides it.
inline std::size_t default_vertex_budget() {
  if (const char* env = std::getenv("COARSE_PLANE_BUDGET"); env && *env) {
    try {
      return static_cast<std::size_t>(std::stoull(env));
    } catch (const std::logic_error&) {
      throw PreconditionError(std::string("COARSE_PLANE_BUDGET is not a count: ") + env);
    }
  }
  return kDefaultVertexBudget;
}

enum class Family { ZLattice, Heisenberg, FreeGroup, RegularTree, HyperbolicTiling, EdgeList };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::ZLattice: return "z-lattice";
    case Family::Heisenberg: return "heisenberg";
    case Family::FreeGroup: return "free-group";
    case Family::RegularTree: return "regular-tree";
    case Family::HyperbolicTiling: return "tiling";
    case Family::EdgeList: return "edge-list";
  }
  return "unknown";
}

// Lazy window onto a locally finite graph. neighbors() is deterministic,
// sorted, duplicate free, never contains its argument and is symmetric.
// Implementations are safe to call concurrently.
class GraphOracle {
 public:
  virtual ~GraphOracle() = default;

  [[nodiscard]] virtual Family family() const = 0;
  // Short family id as accepted by make_oracle(), e.g. "z2" or "tiling-4-5".
  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual int degree_bound() const = 0;
  [[nodiscard]] virtual VertexKey base() const = 0;
  // Human readable description of a valid token, used in EncodingError.
  [[nodiscard]] virtual std::string canonical_form() const = 0;
  [[nodiscard]] virtual bool is_valid(const VertexKey& v) const = 0;

  // Closed-form graph distance, for families whose word metric has one.
  [[nodiscard]] virtual std::optional<std::int64_t> exact_distance(const VertexKey&,
                                                                   const VertexKey&) const {
    return std::nullopt;
  }
  [[nodiscard]] virtual bool is_vertex_transitive() const { return true; }
  [[nodiscard]] virtual bool is_infinite() const { return true; }

  [[nodiscard]] std::vector<VertexKey> neighbors(const VertexKey& v) const {
    validate(v);
    auto out = raw_neighbors(v);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  void validate(const VertexKey& v) const {
    if (!is_valid(v)) {
      std::ostringstream os;
      os << "malformed " << name() << " vertex " << v << ": expected " << canonical_form();
      throw EncodingError(os.str());
    }
  }

 protected:
  // Neighbors of a validated vertex, any order.
  [[nodiscard]] virtual std::vector<VertexKey> raw_neighbors(const VertexKey& v) const = 0;
};

// Z^d with the standard generators.
class LatticeOracle final : public GraphOracle {
 public:
  explicit LatticeOracle(int dim) : dim_(dim) {
    if (dim < 1) throw PreconditionError("lattice dimension must be >= 1");
  }
  [[nodiscard]] int dimension() const { return dim_; }

  Family family() const override { return Family::ZLattice; }
  std::string name() const override { return "z" + std::to_string(dim_); }
  int degree_bound() const override { return 2 * dim_; }
  VertexKey base() const override {
    VertexKey k;
    for (int i = 0; i < dim_; ++i) k.push_back(0);
    return k;
  }
  std::string canonical_form() const override {
    return "integer tuple of length " + std::to_string(dim_);
  }
  bool is_valid(const VertexKey& v) const override {
    return v.size() == static_cast<std::size_t>(dim_);
  }
  std::optional<std::int64_t> exact_distance(const VertexKey& u,
                                             const VertexKey& v) const override {
    std::int64_t d = 0;
    for (int i = 0; i < dim_; ++i) d += std::abs(std::int64_t{u[i]} - v[i]);
    return d;
  }

 protected:
  std::vector<VertexKey> raw_neighbors(const VertexKey& v) const override {
    std::vector<VertexKey> out;
    out.reserve(2 * dim_);
    for (int i = 0; i < dim_; ++i) {
      for (int s : {-1, 1}) {
        VertexKey w = v;
        w[i] += s;
        out.push_back(std::move(w));
      }
    }
    return out;
  }

 private:
  int dim_;
};

// Discrete Heisenberg group. (a,b,c) is the matrix [[1,a,c],[0,1,b],[0,0,1]];
// neighbors are right multiplications by x=(1,0,0), y=(0,1,0) and inverses.
class HeisenbergOracle final : public GraphOracle {
 public:
  Family family() const override { return Family::Heisenberg; }
  std::string name() const override { return "heisenberg"; }
  int degree_bound() const override { return 4; }
  VertexKey base() const override { return {0, 0, 0}; }
  std::string canonical_form() const override {
    return "normal-form triple (a,b,c) of an upper unitriangular integer matrix";
  }
  bool is_valid(const VertexKey& v) const override { return v.size() == 3; }

 protected:
  std::vector<VertexKey> raw_neighbors(const VertexKey& v) const override {
    const auto a = v[0], b = v[1], c = v[2];
    return {{a + 1, b, c}, {a - 1, b, c}, {a, b + 1, c + a}, {a, b - 1, c - a}};
  }
};

namespace detail {

inline std::int64_t reduced_word_distance(const VertexKey& u, const VertexKey& v) {
  std::size_t common = 0;
  while (common < u.size() && common < v.size() && u[common] == v[common]) ++common;
  return static_cast<std::int64_t>(u.size() + v.size() - 2 * common);
}

}  // namespace detail

// Free group of the given rank; vertices are freely reduced words over the
// letters +-1..+-rank.
class FreeGroupOracle final : public GraphOracle {
 public:
  explicit FreeGroupOracle(int rank) : rank_(rank) {
    if (rank < 1) throw PreconditionError("free group rank must be >= 1");
  }
  Family family() const override { return Family::FreeGroup; }
  std::string name() const override { return "free" + std::to_string(rank_); }
  int degree_bound() const override { return 2 * rank_; }
  VertexKey base() const override { return {}; }
  std::string canonical_form() const override {
    return "freely reduced word over letters +-1..+-" + std::to_string(rank_);
  }
  bool is_valid(const VertexKey& v) const override {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] == 0 || std::abs(v[i]) > rank_) return false;
      if (i > 0 && v[i] == -v[i - 1]) return false;
    }
    return true;
  }
  std::optional<std::int64_t> exact_distance(const VertexKey& u,
                                             const VertexKey& v) const override {
    return detail::reduced_word_distance(u, v);
  }

 protected:
  std::vector<VertexKey> raw_neighbors(const VertexKey& v) const override {
    std::vector<VertexKey> out;
    for (int g = 1; g <= rank_; ++g) {
      for (int s : {-g, g}) {
        VertexKey w = v;
        if (!w.empty() && w.back() == -s) w.pop_back(); else w.push_back(s);
        out.push_back(std::move(w));
      }
    }
    return out;
  }

 private:
  int rank_;
};

// Regular tree of the given valence, realised as the Cayley graph of the free
// product of `valence` copies of Z/2: words over 0..valence-1 with no letter
// repeated twice in a row.
class TreeOracle final : public GraphOracle {
 public:
  explicit TreeOracle(int valence) : valence_(valence) {
    if (valence < 2) throw PreconditionError("tree valence must be >= 2");
  }
  [[nodiscard]] int valence() const { return valence_; }
  Family family() const override { return Family::RegularTree; }
  std::string name() const override { return "t" + std::to_string(valence_); }
  int degree_bound() const override { return valence_; }
  VertexKey base() const override { return {}; }
  std::string canonical_form() const override {
    return "word over 0.." + std::to_string(valence_ - 1) + " without immediate repeats";
  }
  bool is_valid(const VertexKey& v) const override {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] < 0 || v[i] >= valence_) return false;
      if (i > 0 && v[i] == v[i - 1]) return false;
    }
    return true;
  }
  std::optional<std::int64_t> exact_distance(const VertexKey& u,
                                             const VertexKey& v) const override {
    return detail::reduced_word_distance(u, v);
  }

 protected:
  std::vector<VertexKey> raw_neighbors(const VertexKey& v) const override {
    std::vector<VertexKey> out;
    for (int a = 0; a < valence_; ++a) {
      VertexKey w = v;
      if (!w.empty() && w.back() == a) w.pop_back(); else w.push_back(a);
      out.push_back(std::move(w));
    }
    return out;
  }

 private:
  int valence_;
};

// A finite graph read from a `u v` per line edge list. Vertices are numbered by
// the sorted order of their names; anything not in the file does not exist.
// Probes must stay within trust_radius of the base vertex.
class EdgeListOracle final : public GraphOracle {
 public:
  EdgeListOracle(std::istream& in, int trust_radius, std::string source = "edge-list")
      : trust_radius_(trust_radius), source_(std::move(source)) {
    std::vector<std::pair<std::string, std::string>> edges;
    std::map<std::string, int> ids;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      std::istringstream ls(line);
      std::string u, v, extra;
      if (!(ls >> u)) continue;
      if (!(ls >> v) || (ls >> extra)) {
        throw EncodingError("edge list line " + std::to_string(lineno) +
                            ": expected exactly two vertex ids");
      }
      ids.emplace(u, 0);
      ids.emplace(v, 0);
      edges.emplace_back(u, v);
    }
    if (ids.empty()) throw PreconditionError("edge list is empty");
    for (auto& [label, id] : ids) {
      id = static_cast<int>(names_.size());
      names_.push_back(label);
    }
    adjacency_.resize(names_.size());
    for (const auto& [u, v] : edges) {
      const int a = ids[u], b = ids[v];
      if (a == b) continue;
      adjacency_[a].push_back(b);
      adjacency_[b].push_back(a);
    }
    for (auto& adj : adjacency_) {
      std::sort(adj.begin(), adj.end());
      adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
      max_degree_ = std::max<int>(max_degree_, static_cast<int>(adj.size()));
    }
  }

  static EdgeListOracle from_file(const std::string& path, int trust_radius) {
    std::ifstream in(path);
    if (!in) throw PreconditionError("cannot open edge list '" + path + "'");
    return EdgeListOracle(in, trust_radius, path);
  }

  [[nodiscard]] int trust_radius() const { return trust_radius_; }
  [[nodiscard]] std::size_t vertex_count() const { return names_.size(); }
  [[nodiscard]] const std::string& label(const VertexKey& v) const {
    validate(v);
    return names_[v[0]];
  }
  [[nodiscard]] VertexKey key_of(const std::string& label) const {
    auto it = std::lower_bound(names_.begin(), names_.end(), label);
    if (it == names_.end() || *it != label) {
      throw EncodingError("unknown edge-list vertex '" + label + "'");
    }
    return {static_cast<VertexKey::value_type>(it - names_.begin())};
  }

  Family family() const override { return Family::EdgeList; }
  std::string name() const override { return "edgelist:" + source_; }
  int degree_bound() const override { return std::max(1, max_degree_); }
  VertexKey base() const override { return {0}; }
  std::string canonical_form() const override {
    return "single id in [0," + std::to_string(names_.size()) + ")";
  }
  bool is_valid(const VertexKey& v) const override {
    return v.size() == 1 && v[0] >= 0 && static_cast<std::size_t>(v[0]) < names_.size();
  }
  bool is_vertex_transitive() const override { return false; }
  bool is_infinite() const override { return false; }

 protected:
  std::vector<VertexKey> raw_neighbors(const VertexKey& v) const override {
    std::vector<VertexKey> out;
    for (int w : adjacency_[v[0]]) out.push_back({w});
    return out;
  }

 private:
  int trust_radius_;
  std::string source_;
  std::vector<std::string> names_;
  std::vector<std::vector<int>> adjacency_;
  int max_degree_ = 0;
};

}  // namespace coarse
