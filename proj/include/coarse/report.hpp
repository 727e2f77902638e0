#pragma once

#include <chrono>
#include <ctime>
#include <iomanip>
#include <sstream>
#include <string>

#include <json.hpp>

#include "circles.hpp"
#include "classify.hpp"
#include "cross_examiner.hpp"

namespace coarse {

// Insertion-ordered so equal inputs give byte-identical output.
using Json = nlohmann::ordered_json;

inline constexpr int kReportSchema = 1;

inline std::string key_string(const VertexKey& k) {
  std::ostringstream os;
  os << k;
  return os.str();
}

inline Json to_json(const ExponentFit& f) {
  return Json{{"n1", f.n1},
              {"n2", f.n2},
              {"slope", f.slope},
              {"residual", f.residual},
              {"log_linear_residual", f.log_linear_residual},
              {"min_ratio", f.min_ratio},
              {"super_polynomial", f.super_polynomial}};
}

inline Json to_json(const GrowthTable& t) {
  Json j{{"family", t.family}, {"requested", t.requested}, {"attained", t.attained()},
         {"partial", t.partial}, {"values", t.values}};
  if (t.attained() >= 2) j["fit"] = to_json(t.fit);
  return j;
}

inline Json to_json(const QGCertificate& c) {
  Json j{{"lambda", to_string(c.lambda)},
         {"c", to_string(c.c)},
         {"verdict", to_string(c.verdict)},
         {"exact", c.exact}};
  if (c.offending) {
    j["offending"] = {{"i", c.offending->i}, {"j", c.offending->j}, {"d", c.offending->d}};
  }
  return j;
}

inline Json to_json(const UbqProbeReport& r) {
  Json comps = Json::array();
  for (const auto& c : r.components) {
    comps.push_back({{"id", c.id},
                     {"size", c.size},
                     {"max_depth_from_base", c.max_depth_from_base},
                     {"touches_ball_boundary", c.touches_ball_boundary},
                     {"deep", c.deep},
                     {"wide", c.wide()}});
  }
  return Json{{"sigma", r.sigma},
              {"D", r.D},
              {"R", r.R},
              {"segment_length", r.segment.length()},
              {"certificate", to_json(r.certificate)},
              {"wide_count", r.wide_count},
              {"verdict", to_string(r.verdict)},
              {"enclosed", r.enclosed},
              {"components", comps},
              {"warnings", r.warnings}};
}

inline Json to_json(const VaropoulosSweep& s) {
  Json j{{"family", s.family}, {"R", s.R},           {"samples", s.samples},
         {"max_size", s.max_size}, {"seed", s.seed}, {"failures", s.failures},
         {"max_ratio", s.max_ratio}, {"all_pass", s.all_pass()}};
  if (s.first_failure) j["first_failure"] = *s.first_failure;
  return j;
}

inline Json to_json(const SweepReport& r) {
  Json buckets = Json::array();
  for (const auto& b : r.buckets) {
    buckets.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}, {"max_jur", b.max_jur},
                       {"longest", b.longest}});
  }
  return Json{{"family", r.family}, {"lambda", to_string(r.lambda)}, {"c", to_string(r.c)},
              {"delta", r.delta},   {"R", r.R},                      {"buckets", buckets},
              {"trend", to_string(r.trend)}};
}

inline Json to_json(const QuasiCircle& q) {
  Json j{{"length", q.length()}, {"lambda", to_string(q.lambda)}, {"c", to_string(q.c)},
         {"certificate", to_json(q.cert)}};
  Json loop = Json::array();
  for (const auto& v : q.loop.vertices) loop.push_back(key_string(v));
  j["loop"] = loop;
  return j;
}

inline Json to_json(const CEReport& r) {
  Json axioms = Json::array();
  for (int k = 0; k < 6; ++k) {
    const auto& a = r.axioms[k];
    Json x{{"axiom", "CE" + std::to_string(k + 1)}, {"pass", a.pass}};
    if (!a.pass) {
      x["index"] = a.index + 1;
      x["detail"] = a.detail;
      if (a.witness) x["witness"] = key_string(*a.witness);
    }
    axioms.push_back(x);
  }
  return Json{{"all_pass", r.all_pass()}, {"failed", r.failed()}, {"axioms", axioms}};
}

inline Json to_json(const SeparationReport& s) {
  Json rows = Json::array();
  for (int i = 0; i < 3; ++i) {
    const auto& r = s.rows[i];
    rows.push_back({{"pair", "w" + std::to_string(i + 1) + ",w" + std::to_string((i + 1) % 3 + 1)},
                    {"status", to_string(r.status)},
                    {"detail", r.detail}});
  }
  return Json{{"all_separated", s.all_separated()}, {"rows", rows}};
}

inline Json to_json(const HyperbolicityEstimate& e) {
  Json rungs = Json::array();
  for (const auto& r : e.rungs) {
    Json w = Json::array();
    for (const auto& v : r.witness) w.push_back(key_string(v));
    rungs.push_back({{"radius", r.radius},
                     {"sphere_size", r.sphere_size},
                     {"pool", r.pool},
                     {"quadruples", r.quadruples},
                     {"delta", r.delta()},
                     {"witness", r.quadruples ? w : Json::array()}});
  }
  return Json{{"seed", e.seed},
              {"sample_count", e.sample_count},
              {"slope", e.slope},
              {"trend", to_string(e.trend)},
              {"trend_note", "plateau/growing split is an artifact convention"},
              {"max_delta", e.max_delta()},
              {"rungs", rungs}};
}

inline Json to_json(const ClassificationVerdict& v) {
  Json ubq = Json::array();
  for (const auto& r : v.ubq) ubq.push_back(to_json(r));
  return Json{{"family", v.family},
              {"label", to_string(v.label)},
              {"reason", v.reason},
              {"R", v.R},
              {"evidence",
               {{"growth", to_json(v.growth)}, {"ubq", ubq}, {"hyperbolicity", to_json(v.delta)}}}};
}

// {"schema":1, "command", "config", "result"[, "meta"]}
inline Json envelope(const std::string& command, Json config, Json result, bool meta) {
  Json j{{"schema", kReportSchema},
         {"command", command},
         {"config", std::move(config)},
         {"result", std::move(result)}};
  if (meta) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    j["meta"] = {{"tool", "coarse-cli"}, {"generated_at", os.str()}};
  }
  return j;
}

inline std::string ubq_csv(const std::vector<UbqProbeReport>& reports) {
  std::ostringstream os;
  os << "sigma,component,size,max_depth,touches_boundary,deep,wide\n";
  for (const auto& r : reports) {
    for (const auto& c : r.components) {
      os << r.sigma << ',' << c.id << ',' << c.size << ',' << c.max_depth_from_base << ','
         << c.touches_ball_boundary << ',' << c.deep << ',' << c.wide() << '\n';
    }
  }
  return os.str();
}

inline std::string delta_csv(const HyperbolicityEstimate& e) {
  std::ostringstream os;
  os << "radius,sphere_size,pool,quadruples,delta\n";
  for (const auto& r : e.rungs) {
    os << r.radius << ',' << r.sphere_size << ',' << r.pool << ',' << r.quadruples << ','
       << r.delta() << '\n';
  }
  return os.str();
}

// Component colours are fixed by component id; N_sigma(S) is grey, S black.
inline const char* component_colour(int id) {
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  return palette[id % 8];
}

inline std::string decomposition_dot(const Ball& ball, const Decomposition& dec,
                                     const std::vector<int>& S, const std::string& name) {
  std::vector<char> in_s(ball.size(), 0);
  for (int v : S) in_s[v] = 1;
  std::ostringstream os;
  os << "graph " << std::quoted(name) << " {\n  node [shape=point, width=0.08];\n";
  for (int v = 0; v < ball.size(); ++v) {
    const char* colour = in_s[v] ? "black"
                         : dec.in_neighborhood(v) ? "grey80"
                                                  : component_colour(dec.component[v]);
    os << "  " << v << " [label=" << std::quoted(key_string(ball.key(v))) << ", color=\""
       << colour << "\"];\n";
  }
  for (int v = 0; v < ball.size(); ++v) {
    for (int w : ball.neighbors(v)) {
      if (v < w) os << "  " << v << " -- " << w << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace coarse
