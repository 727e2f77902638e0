#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "growth.hpp"
#include "hyperbolicity.hpp"
#include "separation.hpp"

namespace coarse {

enum class Label { EuclideanPlaneLike, HyperbolicPlaneLike, UbqFails, Indeterminate };

inline const char* to_string(Label l) {
  switch (l) {
    case Label::EuclideanPlaneLike: return "euclidean-plane-like";
    case Label::HyperbolicPlaneLike: return "hyperbolic-plane-like";
    case Label::UbqFails: return "ubq-fails";
    case Label::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

inline constexpr double kPlaneExponentLow = 1.7;
inline constexpr double kPlaneExponentHigh = 2.3;

struct ClassifyConfig {
  std::vector<int> sigmas{1, 2};
  int max_R = 60;
  std::size_t ball_cap = 400'000;  // R is the largest radius with |B(R)| <= ball_cap
  std::string direction = "default";
  int delta_samples = 500;
  std::uint64_t seed = 1;
};

struct Decision {
  Label label = Label::Indeterminate;
  std::string reason;
};

// The whole decision table. Every input lands in exactly one row.
inline Decision decide(const std::vector<std::pair<int, int>>& sigma_wide, int R,
                       const ExponentFit& fit, DeltaTrend trend) {
  std::ostringstream os;
  for (auto [s, w] : sigma_wide) {
    if (w != 2) {
      os << "sigma=" << s << " gives " << w << " wide components at R=" << R << ", D=" << R / 3;
      return {Label::UbqFails, os.str()};
    }
  }
  const bool planar_exponent = fit.slope >= kPlaneExponentLow && fit.slope <= kPlaneExponentHigh;
  if (planar_exponent && trend == DeltaTrend::Growing) {
    os << "exponent " << fit.slope << " in [" << kPlaneExponentLow << "," << kPlaneExponentHigh
       << "] and delta growing";
    return {Label::EuclideanPlaneLike, os.str()};
  }
  if (trend == DeltaTrend::Plateau && fit.super_polynomial) {
    return {Label::HyperbolicPlaneLike, "delta plateau and super-polynomial growth"};
  }
  os << "conflicting evidence: exponent " << fit.slope
     << (fit.super_polynomial ? " (super-polynomial)" : "") << ", delta " << to_string(trend);
  return {Label::Indeterminate, os.str()};
}

struct ClassificationVerdict {
  std::string family;
  int R = 0;
  GrowthTable growth;
  std::vector<UbqProbeReport> ubq;
  HyperbolicityEstimate delta;
  Label label = Label::Indeterminate;
  std::string reason;
};

inline ClassificationVerdict classify(const OraclePtr& oracle, const ClassifyConfig& cfg = {}) {
  if (cfg.sigmas.empty()) throw PreconditionError("classification needs at least one sigma");
  ClassificationVerdict v;
  v.family = oracle->name();
  v.growth = growth_table(oracle, cfg.max_R, std::nullopt, cfg.ball_cap);
  v.R = v.growth.attained();
  if (v.R < 6) {
    throw PreconditionError("ball cap " + std::to_string(cfg.ball_cap) + " only admits R=" +
                            std::to_string(v.R) + "; need R >= 6");
  }
  const auto ball = materialize_ball(oracle, v.R);
  const auto segment = axis_segment(oracle, cfg.direction, v.R);
  ProbeParams params;
  params.R = v.R;
  params.mode = ProbeMode::GeodesicOnly;
  const auto cert = detail::certify_probe_segment(ball, segment, params);
  std::vector<std::pair<int, int>> sigma_wide;
  for (int s : cfg.sigmas) {
    v.ubq.push_back(detail::probe_with(ball, segment, cert, s, v.R / 3));
    sigma_wide.emplace_back(s, v.ubq.back().wide_count);
  }
  v.delta = hyperbolicity_estimate(ball, cfg.delta_samples, cfg.seed);
  auto d = decide(sigma_wide, v.R, v.growth.fit, v.delta.trend);
  v.label = d.label;
  v.reason = std::move(d.reason);
  return v;
}

inline ClassificationVerdict classify(const std::string& family, const ClassifyConfig& cfg = {}) {
  return classify(make_oracle(family), cfg);
}

}  // namespace coarse
