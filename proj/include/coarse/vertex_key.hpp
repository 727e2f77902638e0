#pragma once

#include <boost/container/small_vector.hpp>
#include <boost/container_hash/hash.hpp>

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <span>

namespace coarse {

// Canonical vertex token. The meaning of the coordinates is family specific:
// lattice coordinates, Heisenberg normal-form triples, reduced words, tiling
// (layer, index) pairs or an edge-list vertex id. Ordering is lexicographic
// with shorter prefixes first, which gives every family a total order.
class VertexKey {
 public:
  using value_type = std::int32_t;
  using storage = boost::container::small_vector<value_type, 6>;

  VertexKey() = default;
  VertexKey(std::initializer_list<value_type> values) : coords_(values) {}
  explicit VertexKey(std::span<const value_type> values)
      : coords_(values.begin(), values.end()) {}
  explicit VertexKey(storage values) : coords_(std::move(values)) {}

  [[nodiscard]] std::size_t size() const { return coords_.size(); }
  [[nodiscard]] bool empty() const { return coords_.empty(); }
  value_type operator[](std::size_t i) const { return coords_[i]; }
  value_type& operator[](std::size_t i) { return coords_[i]; }
  [[nodiscard]] auto begin() const { return coords_.begin(); }
  [[nodiscard]] auto end() const { return coords_.end(); }
  [[nodiscard]] const storage& coords() const { return coords_; }
  storage& coords() { return coords_; }

  void push_back(value_type v) { coords_.push_back(v); }
  void pop_back() { coords_.pop_back(); }
  [[nodiscard]] value_type back() const { return coords_.back(); }

  friend bool operator==(const VertexKey& a, const VertexKey& b) {
    return a.coords_ == b.coords_;
  }
  friend std::strong_ordering operator<=>(const VertexKey& a, const VertexKey& b) {
    const auto n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (a.coords_[i] != b.coords_[i]) return a.coords_[i] <=> b.coords_[i];
    }
    return a.size() <=> b.size();
  }

  friend std::ostream& operator<<(std::ostream& os, const VertexKey& k) {
    os << '(';
    for (std::size_t i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
    return os << ')';
  }

 private:
  storage coords_;
};

struct VertexKeyHash {
  std::size_t operator()(const VertexKey& k) const noexcept {
    return boost::hash_range(k.begin(), k.end());
  }
};

}  // namespace coarse
