#pragma once

#include <memory>
#include <regex>
#include <string>

#include "oracle.hpp"
#include "tiling.hpp"

namespace coarse {

using OraclePtr = std::shared_ptr<const GraphOracle>;

// Family ids: z<d> (plain z is z1), heisenberg, free<r>, t<k>, tiling-<p>-<q> (or {p,q}),
// edgelist:<path>. Edge lists additionally need a trust radius.
inline OraclePtr make_oracle(const std::string& spec, int trust_radius = -1) {
  std::smatch m;
  if (spec == "z") return std::make_shared<LatticeOracle>(1);
  if (std::regex_match(spec, m, std::regex(R"(z(\d+))"))) {
    return std::make_shared<LatticeOracle>(std::stoi(m[1]));
  }
  if (spec == "heisenberg" || spec == "heis") return std::make_shared<HeisenbergOracle>();
  if (std::regex_match(spec, m, std::regex(R"(free(\d+))"))) {
    return std::make_shared<FreeGroupOracle>(std::stoi(m[1]));
  }
  if (std::regex_match(spec, m, std::regex(R"(t(\d+))"))) {
    return std::make_shared<TreeOracle>(std::stoi(m[1]));
  }
  if (std::regex_match(spec, m, std::regex(R"(tiling-(\d+)-(\d+))")) ||
      std::regex_match(spec, m, std::regex(R"(\{(\d+),(\d+)\})"))) {
    return std::make_shared<TilingOracle>(std::stoi(m[1]), std::stoi(m[2]));
  }
  if (spec.rfind("edgelist:", 0) == 0) {
    if (trust_radius < 0) {
      throw PreconditionError("edge-list graphs need a boundary-trust radius");
    }
    return std::make_shared<EdgeListOracle>(
        EdgeListOracle::from_file(spec.substr(9), trust_radius));
  }
  throw PreconditionError("unknown family '" + spec +
                          "' (expected z, z<d>, heisenberg, free<r>, t<k>, tiling-<p>-<q>, "
                          "edgelist:<path>)");
}

}  // namespace coarse
