// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "maopt/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "maopt/error.hpp"
#include "maopt/number_format.hpp"

namespace maopt {

namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::InvalidConfig, what);
}

void check_keys(const YAML::Node& node, const std::string& section,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) config_error("'" + section + "' must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key))
      config_error("unknown key '" + (section.empty() ? key : section + "." + key) + "'");
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) config_error("'" + key + "' must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    config_error("'" + key + "' has an invalid value '" + node.Scalar() + "'");
  }
}

template <typename T>
std::vector<T> scalar_or_list(const YAML::Node& node, const std::string& key) {
  std::vector<T> out;
  if (node.IsSequence()) {
    for (const auto& item : node) out.push_back(scalar<T>(item, key));
  } else {
    out.push_back(scalar<T>(node, key));
  }
  if (out.empty()) config_error("'" + key + "' must not be empty");
  return out;
}

template <typename T>
std::optional<T> auto_or(const YAML::Node& node, const std::string& key,
                         const std::string& keyword) {
  if (node.IsScalar() && node.Scalar() == keyword) return std::nullopt;
  return scalar<T>(node, key);
}

Method parse_method(const std::string& s) {
  if (s == "proposed") return Method::Proposed;
  if (s == "su") return Method::SequentialUpdate;
  if (s == "pso") return Method::Pso;
  if (s == "fpa") return Method::Fpa;
  if (s == "brute_force") return Method::BruteForce;
  config_error("unknown method '" + s + "' (expected proposed, su, pso, fpa, brute_force)");
}

template <typename T>
void emit_list(YAML::Emitter& out, const std::vector<T>& values) {
  if (values.size() == 1) {
    out << values.front();
    return;
  }
  out << YAML::Flow << YAML::BeginSeq;
  for (const auto& v : values) out << v;
  out << YAML::EndSeq;
}

bool is_integer(double x) {
  return std::abs(x - std::round(x)) <= 1e-9 * std::max(1.0, std::abs(x));
}

}  // namespace

std::string_view to_string(Scenario s) {
  return s == Scenario::SingleUser ? "single_user" : "multi_user";
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Proposed: return "proposed";
    case Method::SequentialUpdate: return "su";
    case Method::Pso: return "pso";
    case Method::Fpa: return "fpa";
    case Method::BruteForce: return "brute_force";
  }
  return "?";
}

std::string sweep_variable(const ExperimentConfig& cfg) {
  if (cfg.lengths.size() > 1) return "A";
  if (cfg.points.size() > 1) return "M";
  if (cfg.paths.size() > 1) return "L_t";
  return "none";
}

std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg) {
  std::vector<SweepPoint> out;
  const auto var = sweep_variable(cfg);
  auto points_for = [&](double length) {
    if (!cfg.resolution) return cfg.points.front();
    const double m = length / *cfg.resolution;
    if (!is_integer(m))
      config_error("A = " + format_number(length) + " is not a whole number of resolution steps");
    return static_cast<int>(std::lround(m));
  };
  if (var == "A") {
    for (double a : cfg.lengths) out.push_back({a, points_for(a), a, cfg.paths.front()});
  } else if (var == "M") {
    for (int m : cfg.points) out.push_back({double(m), m, cfg.lengths.front(), cfg.paths.front()});
  } else if (var == "L_t") {
    const double a = cfg.lengths.front();
    for (int l : cfg.paths) out.push_back({double(l), points_for(a), a, l});
  } else {
    const double a = cfg.lengths.front();
    const int m = points_for(a);
    out.push_back({double(m), m, a, cfg.paths.front()});
  }
  return out;
}

ExperimentConfig parse_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    config_error(std::string("YAML syntax: ") + e.what());
  }
  if (!root || root.IsNull()) config_error("empty configuration");
  check_keys(root, "",
             {"scenario", "K", "N", "M", "A", "resolution", "lambda", "d_min", "L_t", "alpha",
              "beta_dB", "distances", "P_dBm", "sigma2_dBm", "realizations", "seed", "output",
              "methods", "threads", "record_timing", "algorithm", "pso", "brute_force"});

  ExperimentConfig cfg;
  bool users_given = false;
  if (auto n = root["scenario"]) {
    const auto s = scalar<std::string>(n, "scenario");
    if (s == "single_user")
      cfg.scenario = Scenario::SingleUser;
    else if (s == "multi_user")
      cfg.scenario = Scenario::MultiUser;
    else
      config_error("scenario must be single_user or multi_user, got '" + s + "'");
  }
  if (auto n = root["K"]) {
    cfg.users = scalar<int>(n, "K");
    users_given = true;
  }
  if (cfg.scenario == Scenario::SingleUser) {
    if (users_given && cfg.users != 1) config_error("K must be 1 for scenario single_user");
    cfg.users = 1;
  }
  if (auto n = root["N"]) cfg.antennas = scalar<int>(n, "N");
  if (auto n = root["M"]) cfg.points = scalar_or_list<int>(n, "M");
  if (auto n = root["A"]) cfg.lengths = scalar_or_list<double>(n, "A");
  if (auto n = root["resolution"]) cfg.resolution = scalar<double>(n, "resolution");
  if (auto n = root["lambda"]) cfg.wavelength = scalar<double>(n, "lambda");
  if (auto n = root["d_min"]) cfg.min_spacing = scalar<double>(n, "d_min");
  if (auto n = root["L_t"]) cfg.paths = scalar_or_list<int>(n, "L_t");
  if (auto n = root["alpha"]) cfg.pathloss_exponent = scalar<double>(n, "alpha");
  if (auto n = root["beta_dB"]) cfg.reference_gain_db = scalar<double>(n, "beta_dB");
  if (auto n = root["distances"]) {
    cfg.distances = scalar_or_list<double>(n, "distances");
  } else if (cfg.scenario == Scenario::SingleUser) {
    cfg.distances = {100.0};
  }
  if (auto n = root["P_dBm"]) cfg.power_dbm = scalar<double>(n, "P_dBm");
  if (auto n = root["sigma2_dBm"]) cfg.noise_dbm = scalar<double>(n, "sigma2_dBm");
  if (auto n = root["realizations"]) cfg.realizations = scalar<int>(n, "realizations");
  if (auto n = root["seed"]) cfg.seed = scalar<std::uint64_t>(n, "seed");
  if (auto n = root["output"]) cfg.output = scalar<std::string>(n, "output");
  if (auto n = root["threads"]) cfg.threads = scalar<int>(n, "threads");
  if (auto n = root["record_timing"]) cfg.record_timing = scalar<bool>(n, "record_timing");
  if (auto n = root["methods"]) {
    cfg.methods.clear();
    for (const auto& s : scalar_or_list<std::string>(n, "methods"))
      cfg.methods.push_back(parse_method(s));
  }

  if (auto alg = root["algorithm"]) {
    check_keys(alg, "algorithm",
               {"rounds", "gibbs_iterations", "candidates", "max_shift", "mu", "initial",
                "early_stop", "rho_mode", "rho_tolerance"});
    auto& a = cfg.algorithm;
    if (auto n = alg["rounds"]) a.rounds = scalar<int>(n, "algorithm.rounds");
    if (auto n = alg["gibbs_iterations"])
      a.gibbs_iterations = auto_or<int>(n, "algorithm.gibbs_iterations", "auto");
    if (auto n = alg["candidates"]) a.candidates = auto_or<int>(n, "algorithm.candidates", "auto");
    if (auto n = alg["max_shift"]) a.max_shift = scalar<int>(n, "algorithm.max_shift");
    if (auto n = alg["mu"]) a.mu = auto_or<double>(n, "algorithm.mu", "adaptive");
    if (auto n = alg["initial"]) {
      const auto s = scalar<std::string>(n, "algorithm.initial");
      if (s == "fpa")
        a.initial = InitialPoint::Fpa;
      else if (s == "random")
        a.initial = InitialPoint::Random;
      else
        config_error("algorithm.initial must be fpa or random");
    }
    if (auto n = alg["early_stop"]) a.early_stop = scalar<bool>(n, "algorithm.early_stop");
    if (auto n = alg["rho_mode"]) {
      const auto s = scalar<std::string>(n, "algorithm.rho_mode");
      if (s == "power")
        a.rho_mode = RhoMode::PowerEquality;
      else if (s == "rate")
        a.rho_mode = RhoMode::RateOptimal;
      else
        config_error("algorithm.rho_mode must be power or rate");
    }
    if (auto n = alg["rho_tolerance"]) a.rho_tolerance = scalar<double>(n, "algorithm.rho_tolerance");
  }

  if (auto pso = root["pso"]) {
    check_keys(pso, "pso",
               {"swarm_size", "iterations", "inertia", "cognitive", "social", "velocity_clamp",
                "penalty", "share_initial"});
    auto& p = cfg.pso;
    if (auto n = pso["swarm_size"]) p.swarm_size = auto_or<int>(n, "pso.swarm_size", "auto");
    if (auto n = pso["iterations"]) p.iterations = scalar<int>(n, "pso.iterations");
    if (auto n = pso["inertia"]) p.inertia = scalar<double>(n, "pso.inertia");
    if (auto n = pso["cognitive"]) p.cognitive = scalar<double>(n, "pso.cognitive");
    if (auto n = pso["social"]) p.social = scalar<double>(n, "pso.social");
    if (auto n = pso["velocity_clamp"]) p.velocity_clamp = scalar<double>(n, "pso.velocity_clamp");
    if (auto n = pso["penalty"]) p.penalty = scalar<double>(n, "pso.penalty");
    if (auto n = pso["share_initial"]) p.share_initial = scalar<bool>(n, "pso.share_initial");
  }

  if (auto bf = root["brute_force"]) {
    check_keys(bf, "brute_force", {"symmetric"});
    if (auto n = bf["symmetric"]) cfg.brute_force_symmetric = scalar<bool>(n, "brute_force.symmetric");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void write_config(const ExperimentConfig& cfg, std::ostream& os) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "scenario" << YAML::Value << std::string(to_string(cfg.scenario));
  out << YAML::Key << "K" << YAML::Value << cfg.users;
  out << YAML::Key << "N" << YAML::Value << cfg.antennas;
  if (sweep_variable(cfg) != "A" || !cfg.resolution) {
    out << YAML::Key << "M" << YAML::Value;
    emit_list(out, cfg.points);
  }
  out << YAML::Key << "A" << YAML::Value;
  emit_list(out, cfg.lengths);
  if (cfg.resolution) out << YAML::Key << "resolution" << YAML::Value << *cfg.resolution;
  out << YAML::Key << "lambda" << YAML::Value << cfg.wavelength;
  out << YAML::Key << "d_min" << YAML::Value << cfg.min_spacing;
  out << YAML::Key << "L_t" << YAML::Value;
  emit_list(out, cfg.paths);
  out << YAML::Key << "alpha" << YAML::Value << cfg.pathloss_exponent;
  out << YAML::Key << "beta_dB" << YAML::Value << cfg.reference_gain_db;
  out << YAML::Key << "distances" << YAML::Value << YAML::Flow << cfg.distances;
  out << YAML::Key << "P_dBm" << YAML::Value << cfg.power_dbm;
  out << YAML::Key << "sigma2_dBm" << YAML::Value << cfg.noise_dbm;
  out << YAML::Key << "realizations" << YAML::Value << cfg.realizations;
  out << YAML::Key << "seed" << YAML::Value << cfg.seed;
  out << YAML::Key << "output" << YAML::Value << cfg.output;
  out << YAML::Key << "methods" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (auto m : cfg.methods) out << std::string(to_string(m));
  out << YAML::EndSeq;
  out << YAML::Key << "threads" << YAML::Value << cfg.threads;
  out << YAML::Key << "record_timing" << YAML::Value << cfg.record_timing;

  const auto& a = cfg.algorithm;
  out << YAML::Key << "algorithm" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "rounds" << YAML::Value << a.rounds;
  out << YAML::Key << "gibbs_iterations" << YAML::Value;
  if (a.gibbs_iterations) out << *a.gibbs_iterations; else out << "auto";
  out << YAML::Key << "candidates" << YAML::Value;
  if (a.candidates) out << *a.candidates; else out << "auto";
  out << YAML::Key << "max_shift" << YAML::Value << a.max_shift;
  out << YAML::Key << "mu" << YAML::Value;
  if (a.mu) out << *a.mu; else out << "adaptive";
  out << YAML::Key << "initial" << YAML::Value
      << (a.initial == InitialPoint::Fpa ? "fpa" : "random");
  out << YAML::Key << "early_stop" << YAML::Value << a.early_stop;
  out << YAML::Key << "rho_mode" << YAML::Value
      << (a.rho_mode == RhoMode::PowerEquality ? "power" : "rate");
  out << YAML::Key << "rho_tolerance" << YAML::Value << a.rho_tolerance;
  out << YAML::EndMap;

  const auto& p = cfg.pso;
  out << YAML::Key << "pso" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "swarm_size" << YAML::Value;
  if (p.swarm_size) out << *p.swarm_size; else out << "auto";
  out << YAML::Key << "iterations" << YAML::Value << p.iterations;
  out << YAML::Key << "inertia" << YAML::Value << p.inertia;
  out << YAML::Key << "cognitive" << YAML::Value << p.cognitive;
  out << YAML::Key << "social" << YAML::Value << p.social;
  out << YAML::Key << "velocity_clamp" << YAML::Value << p.velocity_clamp;
  out << YAML::Key << "penalty" << YAML::Value << p.penalty;
  out << YAML::Key << "share_initial" << YAML::Value << p.share_initial;
  out << YAML::EndMap;

  out << YAML::Key << "brute_force" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "symmetric" << YAML::Value << cfg.brute_force_symmetric;
  out << YAML::EndMap;
  out << YAML::EndMap;
  os << out.c_str() << '\n';
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.antennas < 1) config_error("N must be >= 1");
  if (cfg.users < 1) config_error("K must be >= 1");
  if (cfg.scenario == Scenario::SingleUser && cfg.users != 1)
    config_error("K must be 1 for scenario single_user");
  if (cfg.distances.size() != static_cast<std::size_t>(cfg.users))
    config_error("distances needs one entry per user (K = " + std::to_string(cfg.users) + ")");
  for (double d : cfg.distances)
    if (!(d > 0.0)) config_error("distances must be positive");
  if (!(cfg.wavelength > 0.0)) config_error("lambda must be positive");
  if (!(cfg.min_spacing > 0.0)) config_error("d_min must be positive");
  if (!(cfg.pathloss_exponent > 0.0)) config_error("alpha must be positive");
  if (cfg.realizations < 1) config_error("realizations must be >= 1");
  if (cfg.threads < 1) config_error("threads must be >= 1");
  if (cfg.methods.empty()) config_error("methods must list at least one method");
  if (cfg.output.empty()) config_error("output must not be empty");
  {
    auto sorted = cfg.methods;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      config_error("methods lists a method twice");
  }

  int sweeps = (cfg.points.size() > 1) + (cfg.lengths.size() > 1) + (cfg.paths.size() > 1);
  if (sweeps > 1) config_error("at most one of M, A, L_t may be a list");
  auto ascending = [](const auto& v) {
    return std::adjacent_find(v.begin(), v.end(), [](auto x, auto y) { return !(x < y); }) ==
           v.end();
  };
  if (!ascending(cfg.points) || !ascending(cfg.lengths) || !ascending(cfg.paths))
    config_error("sweep lists must be strictly ascending");
  for (int m : cfg.points)
    if (m < 2) config_error("M values must be >= 2");
  for (double a : cfg.lengths)
    if (!(a > 0.0)) config_error("A values must be positive");
  for (int l : cfg.paths)
    if (l < 1) config_error("L_t values must be >= 1");
  if (cfg.lengths.size() > 1 && !cfg.resolution)
    config_error("an A sweep needs 'resolution' (A / M) to derive M");
  if (cfg.resolution && cfg.points.size() > 1)
    config_error("'resolution' cannot be combined with an M sweep");
  if (cfg.resolution && !(*cfg.resolution > 0.0)) config_error("resolution must be positive");

  const auto& a = cfg.algorithm;
  if (!(a.rho_tolerance > 0.0)) config_error("algorithm.rho_tolerance must be positive");
  const bool needs_fpa =
      std::count(cfg.methods.begin(), cfg.methods.end(), Method::Fpa) > 0 ||
      (a.initial == InitialPoint::Fpa &&
       std::any_of(cfg.methods.begin(), cfg.methods.end(), [](Method m) {
         return m == Method::Proposed || m == Method::SequentialUpdate || m == Method::Pso;
       }));

  for (const auto& sp : sweep_points(cfg)) {
    const auto grid = build_grid(sp.points, sp.length, cfg.wavelength, cfg.min_spacing);
    const int base = grid.points - (cfg.antennas - 1) * (grid.min_index_spacing - 1);
    if (base < cfg.antennas)
      throw Error(ErrorCode::InfeasibleGeometry,
                  std::to_string(cfg.antennas) + " antennas with a_min = " +
                      std::to_string(grid.min_index_spacing) + " do not fit on M = " +
                      std::to_string(grid.points));
    if (needs_fpa) fpa_indices(grid, cfg.antennas);

    AlgorithmConfig alg = AlgorithmConfig::defaults_for(cfg.antennas, grid.points, a.rounds);
    if (a.gibbs_iterations) alg.gibbs_iterations = *a.gibbs_iterations;
    if (a.candidates) alg.candidates = *a.candidates;
    alg.max_shift = a.max_shift;
    alg.mu = a.mu;
    alg.validate();

    if (std::count(cfg.methods.begin(), cfg.methods.end(), Method::BruteForce)) {
      double space = binomial(base, cfg.antennas);
      if (!cfg.brute_force_symmetric) space *= std::tgamma(cfg.antennas + 1.0);
      if (space > kMaxBruteForceConfigurations)
        throw Error(ErrorCode::SearchSpaceTooLarge,
                    "brute force at M = " + std::to_string(grid.points) + " needs " +
                        format_number(space) + " evaluations (guard 1e6)");
    }
  }

  PsoConfig pso = PsoConfig::defaults_for(cfg.antennas);
  if (cfg.pso.swarm_size) pso.swarm_size = *cfg.pso.swarm_size;
  pso.iterations = cfg.pso.iterations;
  pso.inertia = cfg.pso.inertia;
  pso.cognitive = cfg.pso.cognitive;
  pso.social = cfg.pso.social;
  pso.velocity_clamp = cfg.pso.velocity_clamp;
  pso.penalty = cfg.pso.penalty;
  pso.validate();
}

ExperimentConfig figure_preset(std::string_view name) {
  constexpr double lambda = 0.06;
  ExperimentConfig cfg;
  cfg.wavelength = lambda;
  cfg.min_spacing = lambda / 2;
  cfg.antennas = 8;
  cfg.lengths = {6 * lambda};
  cfg.points = {48};
  cfg.paths = {9};
  cfg.pathloss_exponent = 2.8;
  cfg.reference_gain_db = -46.0;
  cfg.realizations = 200;
  cfg.methods = {Method::Proposed, Method::SequentialUpdate, Method::Pso, Method::Fpa};
  cfg.output = std::string(name);

  if (name == "fig2") {
    cfg.scenario = Scenario::SingleUser;
    cfg.users = 1;
    cfg.distances = {100.0};
    cfg.algorithm.rounds = 2;
    cfg.points = {24, 36, 48};
  } else if (name == "fig3") {
    cfg.scenario = Scenario::MultiUser;
    cfg.users = 3;
    cfg.distances = {100.0, 60.0, 40.0};
    cfg.algorithm.rounds = 5;
    cfg.points = {24, 36, 48};
  } else if (name == "fig4") {
    cfg.scenario = Scenario::MultiUser;
    cfg.users = 3;
    cfg.distances = {100.0, 60.0, 40.0};
    cfg.algorithm.rounds = 5;
    cfg.paths = {1, 3, 5, 7, 9, 11, 13};
  } else if (name == "fig5") {
    cfg.scenario = Scenario::MultiUser;
    cfg.users = 3;
    cfg.distances = {100.0, 60.0, 40.0};
    cfg.algorithm.rounds = 5;
    // N = 8 at a_min = 4 needs M > 28, so the sweep starts at 4 lambda
    cfg.lengths = {4 * lambda, 5 * lambda, 6 * lambda, 7 * lambda, 8 * lambda};
    cfg.resolution = lambda / 8;
    cfg.points = {48};
  } else {
    throw Error(ErrorCode::UnknownPreset,
                "unknown preset '" + std::string(name) + "' (expected fig2, fig3, fig4, fig5)");
  }
  return cfg;
}

}  // namespace maopt
