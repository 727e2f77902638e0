#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coarse/coarse.hpp"

using namespace coarse;

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitError = 1;
constexpr int kExitViolates = 2;
constexpr int kExitIndeterminate = 3;

struct RunConfig {
  std::string family = "z2";
  std::string format;  // per-command default when empty
  std::string out;
  std::string direction = "default";
  std::string mode = "geodesic";
  std::vector<int> sigmas{1};
  int R = -1, D = -1, N = -1;
  std::string window;
  std::string lambda = "1", c = "0";
  int delta = 1;
  std::string buckets = "4-10,11-20,21-30,31-40";
  int min_length = 4, max_length = 40, attempts = 200;
  int samples = 1000, max_size = 300;
  int delta_samples = 500;
  int r_scale = 21, halflength = 80;
  int max_R = 60;
  std::size_t ball_cap = 400'000;
  std::size_t budget = 0;
  std::uint64_t seed = 1;
  bool no_meta = false, strict = false;

  // Filled in by validation.
  OraclePtr oracle;
  Rational lam{1}, cc{0};
  std::optional<std::pair<int, int>> win;
  std::vector<std::pair<int, int>> bucket_list;
};

struct Output {
  std::string text;
  int strict_code = 0;
};

std::pair<int, int> parse_range(const std::string& s, char sep) {
  const auto at = s.find(sep);
  if (at == std::string::npos) throw PreconditionError("expected lo" + std::string(1, sep) + "hi, got '" + s + "'");
  try {
    const int lo = std::stoi(s.substr(0, at)), hi = std::stoi(s.substr(at + 1));
    if (lo < 0 || hi < lo) throw PreconditionError("empty range '" + s + "'");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw PreconditionError("bad range '" + s + "'");
  }
}

// Flat key=value lines become --key value tokens; flags given on the command
// line win.
std::vector<std::string> expand_config(std::vector<std::string> args,
                                       const std::set<std::string>& commands) {
  std::string path;
  std::size_t cmd_at = args.size();
  std::set<std::string> given;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& a = args[i];
    if (a == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (a.rfind("--config=", 0) == 0) {
      path = a.substr(9);
    } else if (a.rfind("--", 0) == 0) {
      given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
    } else if (cmd_at == args.size() && commands.count(a)) {
      cmd_at = i;
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot read config file '" + path + "'");
  std::vector<std::string> extra;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw CLI::ValidationError("--config", path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r"), e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty() || key == "config") {
      throw CLI::ValidationError("--config", path + ":" + std::to_string(lineno) + ": bad key");
    }
    if (given.count(key)) continue;
    if (key == "no-meta" || key == "strict") {
      if (value == "true" || value == "1") {
        extra.push_back("--" + key);
      } else if (value != "false" && value != "0") {
        throw CLI::ValidationError("--config", key + " takes true or false");
      }
      continue;
    }
    extra.push_back("--" + key);
    extra.push_back(value);
  }
  if (cmd_at == args.size()) return args;  // no subcommand: let the parser complain
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(cmd_at) + 1, extra.begin(), extra.end());
  return args;
}

int strict_of_ubq(const std::vector<UbqProbeReport>& reps) {
  int code = 0;
  for (const auto& r : reps) {
    if (r.verdict == UbqVerdict::TooFewWide || r.verdict == UbqVerdict::TooManyWide) return kExitViolates;
    if (r.verdict == UbqVerdict::Indeterminate) code = kExitIndeterminate;
  }
  return code;
}

Output cmd_growth(const RunConfig& c) {
  const auto t = growth_table(c.oracle, c.N, c.win, default_vertex_budget());
  Json cfg{{"family", c.family}, {"N", c.N}};
  if (c.win) cfg["window"] = c.window;
  Output o;
  o.strict_code = t.partial ? kExitIndeterminate : 0;
  o.text = c.format == "csv" ? t.csv() : envelope("growth", cfg, to_json(t), !c.no_meta).dump(2) + "\n";
  return o;
}

Output cmd_ubq(const RunConfig& c) {
  const auto ball = materialize_ball(c.oracle, c.R);
  const auto segment = axis_segment(c.oracle, c.direction, c.R);
  ProbeParams params;
  params.lambda = c.lam;
  params.c = c.cc;
  params.R = c.R;
  params.D = c.D;
  params.mode = c.mode == "geodesic" ? ProbeMode::GeodesicOnly : ProbeMode::QuasiGeodesic;
  const auto cert = detail::certify_probe_segment(ball, segment, params);
  std::vector<UbqProbeReport> reps;
  for (int s : c.sigmas) reps.push_back(detail::probe_with(ball, segment, cert, s, params.depth_threshold()));
  Output o;
  o.strict_code = strict_of_ubq(reps);
  if (c.format == "csv") {
    o.text = ubq_csv(reps);
  } else if (c.format == "dot") {
    const auto dec = complement_components(ball, segment, c.sigmas.front(), params.depth_threshold());
    o.text = decomposition_dot(ball, dec, ball_indices(ball, segment),
                               c.family + " sigma=" + std::to_string(c.sigmas.front()));
  } else {
    Json probes = Json::array();
    Json wide = Json::array();
    for (const auto& r : reps) {
      probes.push_back(to_json(r));
      wide.push_back(r.wide_count);
    }
    Json cfg{{"family", c.family}, {"direction", c.direction}, {"sigma", c.sigmas},
             {"R", c.R},           {"D", params.depth_threshold()}, {"mode", c.mode},
             {"lambda", to_string(c.lam)}, {"c", to_string(c.cc)}};
    Json result{{"family", c.oracle->name()}, {"wide_counts", wide}, {"probes", probes}};
    if (reps.size() == 1) result["wide_count"] = reps.front().wide_count;
    o.text = envelope("ubq", cfg, result, !c.no_meta).dump(2) + "\n";
  }
  return o;
}

Output cmd_jurisdiction(const RunConfig& c) {
  const auto ball = materialize_ball(c.oracle, c.R);
  SearchParams sp;
  sp.attempts = c.attempts;
  sp.seed = c.seed;
  const auto rep = limited_jurisdiction_sweep(ball, c.lam, c.cc, c.delta, c.bucket_list, sp);
  Output o;
  o.strict_code = rep.trend == JurisdictionTrend::Vacuous ? kExitIndeterminate : 0;
  Json cfg{{"family", c.family}, {"R", c.R}, {"lambda", to_string(c.lam)}, {"c", to_string(c.cc)},
           {"delta", c.delta}, {"buckets", c.buckets}, {"attempts", c.attempts}, {"seed", c.seed}};
  o.text = c.format == "csv" ? rep.csv() : envelope("jurisdiction", cfg, to_json(rep), !c.no_meta).dump(2) + "\n";
  return o;
}

Output cmd_circles(const RunConfig& c) {
  const auto ball = materialize_ball(c.oracle, c.R);
  SearchParams sp{c.min_length, c.max_length, c.attempts, c.seed};
  const auto found = search_quasi_circles(ball, c.lam, c.cc, sp);
  Output o;
  o.strict_code = found.empty() ? kExitIndeterminate : 0;
  if (c.format == "csv") {
    std::ostringstream os;
    os << "index,length,verdict\n";
    for (std::size_t i = 0; i < found.size(); ++i) {
      os << i << ',' << found[i].length() << ',' << to_string(found[i].cert.verdict) << '\n';
    }
    o.text = os.str();
  } else {
    Json list = Json::array();
    for (const auto& q : found) list.push_back(to_json(q));
    Json cfg{{"family", c.family}, {"R", c.R}, {"lambda", to_string(c.lam)}, {"c", to_string(c.cc)},
             {"min_length", c.min_length}, {"max_length", c.max_length}, {"attempts", c.attempts},
             {"seed", c.seed}};
    o.text = envelope("circles", cfg, Json{{"count", found.size()}, {"circles", list}}, !c.no_meta).dump(2) + "\n";
  }
  return o;
}

Output cmd_ce(const RunConfig& c) {
  const int sigma = c.sigmas.front();
  const auto ce = construct_ce_z2(sigma, c.r_scale, c.halflength);
  const auto ball = materialize_ball(c.oracle, std::max(ce.R, c.halflength));
  const auto rep = validate_cross_examiner(ball, ce);
  const auto sep = witness_separation_check(ball, ce, rep);
  Output o;
  if (!rep.all_pass()) {
    o.strict_code = kExitViolates;
  } else {
    for (const auto& row : sep.rows) {
      if (row.status == SeparationStatus::NotSeparated) o.strict_code = kExitViolates;
      if (row.status == SeparationStatus::Indeterminate && !o.strict_code) o.strict_code = kExitIndeterminate;
    }
  }
  Json rho = Json::array();
  for (int i = 0; i < 3; ++i) {
    rho.push_back(to_json(certify_quasi_geodesic(ball, ce.rho(i), Rational(1), Rational(0))));
  }
  if (c.format == "csv") {
    std::ostringstream os;
    os << "axiom,pass\n";
    for (int k = 0; k < 6; ++k) os << "CE" << k + 1 << ',' << rep.axioms[k].pass << '\n';
    o.text = os.str();
  } else {
    Json cfg{{"family", c.family}, {"sigma", sigma}, {"r_scale", c.r_scale}, {"halflength", c.halflength}};
    Json result{{"R", ce.R}, {"r", ce.r}, {"sigma", ce.sigma},
                {"validation", to_json(rep)}, {"separation", to_json(sep)}, {"rho_certificates", rho}};
    o.text = envelope("ce", cfg, result, !c.no_meta).dump(2) + "\n";
  }
  return o;
}

// Largest R <= 25 whose table radius R+4 stays under 200k vertices.
int auto_iso_radius(const OraclePtr& oracle) {
  const auto t = growth_table(oracle, 29, std::nullopt, 200'000);
  return std::max(2, std::min(25, t.attained() - 4));
}

Output cmd_iso(const RunConfig& c) {
  const int R = c.R > 0 ? c.R : auto_iso_radius(c.oracle);
  const auto s = varopoulos_sweep(c.oracle, R, c.samples, c.seed, c.max_size);
  Output o;
  o.strict_code = s.all_pass() ? 0 : kExitViolates;
  if (c.format == "csv") {
    std::ostringstream os;
    os << "family,R,samples,failures,max_ratio\n"
       << s.family << ',' << s.R << ',' << s.samples << ',' << s.failures << ',' << s.max_ratio << '\n';
    o.text = os.str();
  } else {
    Json cfg{{"family", c.family}, {"R", R}, {"samples", c.samples}, {"max_size", c.max_size}, {"seed", c.seed}};
    o.text = envelope("iso", cfg, to_json(s), !c.no_meta).dump(2) + "\n";
  }
  return o;
}

Output cmd_hyperbolicity(const RunConfig& c) {
  const auto ball = materialize_ball(c.oracle, c.R);
  const auto e = hyperbolicity_estimate(ball, c.delta_samples, c.seed);
  Output o;
  Json cfg{{"family", c.family}, {"R", c.R}, {"samples", c.delta_samples}, {"seed", c.seed}};
  o.text = c.format == "csv" ? delta_csv(e) : envelope("hyperbolicity", cfg, to_json(e), !c.no_meta).dump(2) + "\n";
  return o;
}

Output cmd_classify(const RunConfig& c) {
  ClassifyConfig cc;
  cc.sigmas = c.sigmas;
  cc.max_R = c.max_R;
  cc.ball_cap = c.ball_cap;
  cc.direction = c.direction;
  cc.delta_samples = c.delta_samples;
  cc.seed = c.seed;
  const auto v = classify(c.oracle, cc);
  Output o;
  o.strict_code = v.label == Label::UbqFails        ? kExitViolates
                  : v.label == Label::Indeterminate ? kExitIndeterminate
                                                    : 0;
  if (c.format == "csv") {
    std::ostringstream os;
    os << "family,R,exponent,super_polynomial,delta_trend,wide_counts,label\n"
       << v.family << ',' << v.R << ',' << v.growth.fit.slope << ',' << v.growth.fit.super_polynomial
       << ',' << to_string(v.delta.trend) << ',';
    for (std::size_t i = 0; i < v.ubq.size(); ++i) os << (i ? ";" : "") << v.ubq[i].wide_count;
    os << ',' << to_string(v.label) << '\n';
    o.text = os.str();
  } else {
    Json cfg{{"family", c.family}, {"sigma", c.sigmas}, {"max_R", c.max_R}, {"ball_cap", c.ball_cap},
             {"direction", c.direction}, {"samples", c.delta_samples}, {"seed", c.seed}};
    o.text = envelope("classify", cfg, to_json(v), !c.no_meta).dump(2) + "\n";
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-scale probes of coarse geometry in graphs", "coarse-cli"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  RunConfig cfg;
  std::string config_path;

  auto common = [&](CLI::App* sub, std::vector<std::string> formats) {
    sub->add_option("--family", cfg.family, "z<d>, heisenberg, free<r>, t<k>, tiling-<p>-<q>, edgelist:<path>");
    sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember(formats));
    sub->add_option("--out", cfg.out, "write the report here instead of stdout");
    sub->add_option("--config", config_path, "flat key=value file mirroring the flags");
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--budget", cfg.budget, "vertex budget (overrides COARSE_PLANE_BUDGET)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--no-meta", cfg.no_meta, "omit the timestamped meta block");
    sub->add_flag("--strict", cfg.strict, "exit 2 on violates, 3 on indeterminate");
  };
  auto constants = [&](CLI::App* sub) {
    sub->add_option("--lambda", cfg.lambda, "multiplicative constant, rational");
    sub->add_option("--c", cfg.c, "additive constant, rational");
  };
  auto sigma_list = [&](CLI::App* sub) {
    sub->add_option("--sigma", cfg.sigmas, "neighbourhood radius, comma list allowed")
        ->delimiter(',')
        ->check(CLI::PositiveNumber)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  };

  auto* growth = app.add_subcommand("growth", "exact growth table |B(n)|");
  common(growth, {"json", "csv"});
  growth->add_option("--N", cfg.N, "largest radius")->required()->check(CLI::NonNegativeNumber);
  growth->add_option("--window", cfg.window, "exponent fit window n1,n2");

  auto* ubq = app.add_subcommand("ubq", "wide components of B_R minus N_sigma(axis)");
  common(ubq, {"json", "csv", "dot"});
  sigma_list(ubq);
  constants(ubq);
  ubq->add_option("--R", cfg.R, "ball radius")->required()->check(CLI::PositiveNumber);
  ubq->add_option("--D", cfg.D, "depth threshold (default R/3)")->check(CLI::NonNegativeNumber);
  ubq->add_option("--direction", cfg.direction, "axis name");
  ubq->add_option("--mode", cfg.mode, "segment certification")->check(CLI::IsMember({"geodesic", "quasi"}));

  auto* jur = app.add_subcommand("jurisdiction", "jurisdiction sweep over found quasi-circles");
  common(jur, {"json", "csv"});
  constants(jur);
  jur->add_option("--R", cfg.R, "ball radius")->required()->check(CLI::PositiveNumber);
  jur->add_option("--delta", cfg.delta, "jurisdiction scale")->check(CLI::NonNegativeNumber);
  jur->add_option("--buckets", cfg.buckets, "length buckets lo-hi,lo-hi,...");
  jur->add_option("--attempts", cfg.attempts, "search attempts")->check(CLI::PositiveNumber);

  auto* circles = app.add_subcommand("circles", "seeded quasi-circle search");
  common(circles, {"json", "csv"});
  constants(circles);
  circles->add_option("--R", cfg.R, "ball radius")->required()->check(CLI::PositiveNumber);
  circles->add_option("--min-length", cfg.min_length)->check(CLI::PositiveNumber);
  circles->add_option("--max-length", cfg.max_length)->check(CLI::PositiveNumber);
  circles->add_option("--attempts", cfg.attempts, "search attempts")->check(CLI::PositiveNumber);

  auto* ce = app.add_subcommand("ce", "build and validate the Z^2 cross-examiner");
  common(ce, {"json", "csv"});
  sigma_list(ce);
  ce->add_option("--r-scale", cfg.r_scale, "r = r_scale * sigma")->check(CLI::PositiveNumber);
  ce->add_option("--halflength", cfg.halflength, "ray halflength")->check(CLI::PositiveNumber);

  auto* iso = app.add_subcommand("iso", "isoperimetric inequality on random connected sets");
  common(iso, {"json", "csv"});
  iso->add_option("--samples", cfg.samples, "number of sets")->check(CLI::PositiveNumber);
  iso->add_option("--max-size", cfg.max_size, "largest set size")->check(CLI::PositiveNumber);
  iso->add_option("--R", cfg.R, "ball radius (default: automatic)")->check(CLI::Range(2, 1000));

  auto* hyp = app.add_subcommand("hyperbolicity", "sampled four-point defect by radius");
  common(hyp, {"json", "csv"});
  hyp->add_option("--R", cfg.R, "ball radius")->required()->check(CLI::Range(6, 100000));
  hyp->add_option("--samples", cfg.delta_samples, "quadruples per rung")->check(CLI::PositiveNumber);

  auto* cls = app.add_subcommand("classify", "growth, UBQ and hyperbolicity verdict");
  common(cls, {"json", "csv"});
  auto* cls_sigma = cls->add_option("--sigma", cfg.sigmas, "sigma sweep (default 1,2)")
                        ->delimiter(',')
                        ->check(CLI::PositiveNumber)
                        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  cls->add_option("--max-R", cfg.max_R, "largest radius tried")->check(CLI::Range(6, 100000));
  cls->add_option("--ball-cap", cfg.ball_cap, "vertex cap that fixes R")->check(CLI::PositiveNumber);
  cls->add_option("--direction", cfg.direction, "axis name");
  cls->add_option("--samples", cfg.delta_samples, "quadruples per rung")->check(CLI::PositiveNumber);

  CLI::App* chosen = nullptr;
  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::set<std::string> commands;
    for (const auto* sub : app.get_subcommands({})) commands.insert(sub->get_name());
    args = expand_config(std::move(args), commands);
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
    chosen = app.get_subcommands().front();

    // Everything below is validation; no probe has run yet.
    const std::string cmd = chosen->get_name();
    if (cmd == "classify" && cls_sigma->count() == 0) cfg.sigmas = ClassifyConfig{}.sigmas;
    if (cfg.format.empty()) cfg.format = cmd == "growth" ? "csv" : "json";
    if (cfg.budget) setenv("COARSE_PLANE_BUDGET", std::to_string(cfg.budget).c_str(), 1);
    cfg.oracle = make_oracle(cfg.family);
    cfg.lam = parse_rational(cfg.lambda);
    cfg.cc = parse_rational(cfg.c);
    detail::check_constants(cfg.lam, cfg.cc);
    if (cfg.sigmas.empty()) throw PreconditionError("--sigma needs at least one value");
    if (!cfg.window.empty()) {
      cfg.win = parse_range(cfg.window, ',');
      if (cfg.win->first < 1 || cfg.win->second > cfg.N) throw PreconditionError("--window must lie in [1, N]");
    }
    if (cmd == "jurisdiction") {
      std::stringstream ss(cfg.buckets);
      for (std::string part; std::getline(ss, part, ',');) cfg.bucket_list.push_back(parse_range(part, '-'));
      if (cfg.bucket_list.empty()) throw PreconditionError("--buckets is empty");
    }
    if (cmd == "circles" && cfg.min_length > cfg.max_length) {
      throw PreconditionError("--min-length exceeds --max-length");
    }
    if (cmd == "ce") {
      if (cfg.oracle->name() != "z2") throw PreconditionError("the cross-examiner is built on z2 only");
      if (cfg.sigmas.size() != 1) throw PreconditionError("ce takes a single --sigma");
    }
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  Output out;
  try {
    const std::string cmd = chosen->get_name();
    if (cmd == "growth") out = cmd_growth(cfg);
    else if (cmd == "ubq") out = cmd_ubq(cfg);
    else if (cmd == "jurisdiction") out = cmd_jurisdiction(cfg);
    else if (cmd == "circles") out = cmd_circles(cfg);
    else if (cmd == "ce") out = cmd_ce(cfg);
    else if (cmd == "iso") out = cmd_iso(cfg);
    else if (cmd == "hyperbolicity") out = cmd_hyperbolicity(cfg);
    else out = cmd_classify(cfg);
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << " (attained radius " << e.attained_radius << ")\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }

  if (cfg.out.empty()) {
    std::cout << out.text;
  } else {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot write " << cfg.out << "\n";
      return kExitError;
    }
    f << out.text;
  }
  return cfg.strict ? out.strict_code : 0;
}
