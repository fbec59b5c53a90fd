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

#include "maopt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <limits>
#include <fstream>
#include <mutex>
#include <thread>

#include "maopt/error.hpp"
#include "maopt/number_format.hpp"

namespace maopt {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Independent substreams of one realization seed.
enum class Stream : std::uint64_t { Channel = 0, Initial = 1, MethodBase = 16 };

Rng substream(std::uint64_t realization, std::uint64_t stream) {
  return Rng(splitmix64(realization ^ splitmix64(stream + 0x632be59bd9b4e019ull)));
}

struct Resolved {
  SweepPoint point;
  SamplingGrid grid;
  AlgorithmConfig algorithm;
  PsoConfig pso;
};

struct RealizationOutput {
  std::vector<RunRow> runs;
  std::vector<TraceRow> traces;
};

void check_budget(const AlgorithmResult& res, const AlgorithmConfig& alg, int antennas,
                  int points) {
  const std::int64_t su_cap = static_cast<std::int64_t>(antennas) * points;
  const std::int64_t gs_cap = static_cast<std::int64_t>(alg.candidates) * alg.gibbs_iterations;
  std::int64_t su_total = 0;
  double previous = -std::numeric_limits<double>::infinity();
  for (const auto& rec : res.trace) {
    su_total += rec.sequential_evals;
    if (rec.sequential_evals > su_cap)
      throw Error(ErrorCode::InvariantViolation,
                  "sequential round used " + std::to_string(rec.sequential_evals) +
                      " evaluations, cap N*M = " + std::to_string(su_cap));
    if (rec.gibbs_evals > gs_cap)
      throw Error(ErrorCode::InvariantViolation,
                  "Gibbs phase used " + std::to_string(rec.gibbs_evals) +
                      " evaluations, cap S*T = " + std::to_string(gs_cap));
    if (rec.utility_sequential < previous || rec.utility_gibbs < rec.utility_sequential)
      throw Error(ErrorCode::InvariantViolation, "utility trace decreased");
    previous = rec.utility_gibbs;
  }
  if (su_total > su_cap * alg.rounds)
    throw Error(ErrorCode::InvariantViolation, "sequential updates exceeded L*N*M evaluations");
}

RealizationOutput run_realization(const ExperimentConfig& cfg, const Resolved& rp,
                                  int realization) {
  using Clock = std::chrono::steady_clock;
  const std::uint64_t seed = realization_seed(cfg.seed, realization);
  const SamplingGrid& grid = rp.grid;
  const FeasibilityOracle feasible(grid);

  const ChannelMap channel = realization_channel(cfg, rp.point, realization);
  const std::uint64_t checksum = channel.checksum();

  const double power = dbm_to_watts(cfg.power_dbm);
  const double noise = dbm_to_watts(cfg.noise_dbm);
  const auto utility_fn =
      cfg.scenario == Scenario::SingleUser
          ? snr_utility(channel, power, noise)
          : sum_rate_utility(channel, power, noise,
                             RhoSearch{cfg.algorithm.rho_tolerance, 60, 200, cfg.algorithm.rho_mode});

  IndexVector initial;
  if (cfg.algorithm.initial == InitialPoint::Fpa) {
    initial = fpa_indices(grid, cfg.antennas);
  } else {
    Rng init_rng = substream(seed, static_cast<std::uint64_t>(Stream::Initial));
    initial = random_feasible(grid.points, cfg.antennas, grid.min_index_spacing, 1, init_rng).front();
  }

  RealizationOutput out;
  for (Method method : cfg.methods) {
    const auto started = Clock::now();
    UtilityOracle utility(utility_fn);
    Rng rng = substream(seed, static_cast<std::uint64_t>(Stream::MethodBase) +
                                  static_cast<std::uint64_t>(method));
    RunRow row;
    row.sweep_value = rp.point.value;
    row.realization = realization;
    row.method = method;
    row.seed = seed;
    row.channel_checksum = checksum;

    switch (method) {
      case Method::Proposed:
      case Method::SequentialUpdate: {
        AlgorithmConfig alg = rp.algorithm;
        alg.gibbs_phase = method == Method::Proposed;
        auto res = run_algorithm_1(initial, utility, alg, feasible, rng);
        check_budget(res, alg, cfg.antennas, grid.points);
        row.solution = res.solution;
        row.utility = res.utility;
        for (const auto& rec : res.trace)
          out.traces.push_back({rp.point.value, realization, method, rec, res.stagnation_stop});
        break;
      }
      case Method::Pso: {
        std::vector<IndexVector> seeds;
        if (cfg.pso.share_initial) seeds.push_back(initial);
        auto res = pso_optimize(utility, grid, cfg.antennas, rp.pso, rng, seeds);
        row.solution = res.solution;
        row.utility = res.utility;
        row.feasible = res.feasible;
        break;
      }
      case Method::Fpa: {
        row.solution = fpa_indices(grid, cfg.antennas);
        row.utility = utility(row.solution);
        break;
      }
      case Method::BruteForce: {
        auto res = brute_force_optimum(grid.points, cfg.antennas, grid.min_index_spacing, utility,
                                       cfg.brute_force_symmetric);
        row.solution = res.solution;
        row.utility = res.utility;
        break;
      }
    }
    row.eval_count = utility.eval_count();
    if (cfg.record_timing)
      row.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - started).count();
    if (channel.checksum() != checksum)
      throw Error(ErrorCode::InvariantViolation, "channel map changed during a method run");
    out.runs.push_back(std::move(row));
  }
  return out;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  return out;
}

void close_output(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
}

}  // namespace

ChannelMap realization_channel(const ExperimentConfig& cfg, const SweepPoint& point,
                               int realization) {
  const SamplingGrid grid =
      build_grid(point.points, point.length, cfg.wavelength, cfg.min_spacing);
  Rng rng = substream(realization_seed(cfg.seed, realization),
                      static_cast<std::uint64_t>(Stream::Channel));
  const PathSet paths = draw_paths(cfg.users, point.paths, cfg.distances, cfg.pathloss_exponent,
                                   db_to_linear(cfg.reference_gain_db), rng);
  return generate_channel_map(paths, grid);
}

std::uint64_t realization_seed(std::uint64_t master, int realization) {
  return splitmix64(splitmix64(master) + static_cast<std::uint64_t>(realization));
}

double ExperimentResult::mean(Method method, double sweep_value) const {
  for (const auto& s : summary)
    if (s.method == method && s.sweep_value == sweep_value) return s.mean_utility;
  throw Error(ErrorCode::InvalidConfig, "no summary row for " + std::string(to_string(method)) +
                                            " at " + format_number(sweep_value));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);

  std::vector<Resolved> resolved;
  for (const auto& sp : sweep_points(cfg)) {
    Resolved r;
    r.point = sp;
    r.grid = build_grid(sp.points, sp.length, cfg.wavelength, cfg.min_spacing);
    r.algorithm = AlgorithmConfig::defaults_for(cfg.antennas, sp.points, cfg.algorithm.rounds);
    if (cfg.algorithm.gibbs_iterations) r.algorithm.gibbs_iterations = *cfg.algorithm.gibbs_iterations;
    if (cfg.algorithm.candidates) r.algorithm.candidates = *cfg.algorithm.candidates;
    r.algorithm.max_shift = cfg.algorithm.max_shift;
    r.algorithm.mu = cfg.algorithm.mu;
    r.algorithm.early_stop = cfg.algorithm.early_stop;
    r.pso = PsoConfig::defaults_for(cfg.antennas);
    if (cfg.pso.swarm_size) r.pso.swarm_size = *cfg.pso.swarm_size;
    r.pso.iterations = cfg.pso.iterations;
    r.pso.inertia = cfg.pso.inertia;
    r.pso.cognitive = cfg.pso.cognitive;
    r.pso.social = cfg.pso.social;
    r.pso.velocity_clamp = cfg.pso.velocity_clamp;
    r.pso.penalty = cfg.pso.penalty;
    resolved.push_back(r);
  }

  // one task per (sweep point, realization); results land in fixed slots
  const std::size_t tasks = resolved.size() * static_cast<std::size_t>(cfg.realizations);
  std::vector<RealizationOutput> slots(tasks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks; i = next++) {
      try {
        const auto& rp = resolved[i / cfg.realizations];
        slots[i] = run_realization(cfg, rp, static_cast<int>(i % cfg.realizations));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks;
      }
    }
  };
  const int threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(tasks)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult result;
  result.sweep_var = sweep_variable(cfg);
  result.utility_units = cfg.scenario == Scenario::SingleUser ? "snr_linear" : "bits_per_s_per_hz";
  for (auto& slot : slots) {
    std::move(slot.runs.begin(), slot.runs.end(), std::back_inserter(result.runs));
    std::move(slot.traces.begin(), slot.traces.end(), std::back_inserter(result.traces));
  }

  for (const auto& rp : resolved) {
    for (Method method : cfg.methods) {
      SummaryRow s;
      s.sweep_value = rp.point.value;
      s.method = method;
      double sum = 0.0;
      for (const auto& r : result.runs)
        if (r.method == method && r.sweep_value == s.sweep_value) {
          sum += r.utility;
          ++s.realizations;
        }
      s.mean_utility = sum / s.realizations;
      double sq = 0.0;
      for (const auto& r : result.runs)
        if (r.method == method && r.sweep_value == s.sweep_value)
          sq += (r.utility - s.mean_utility) * (r.utility - s.mean_utility);
      s.std_utility = s.realizations > 1 ? std::sqrt(sq / (s.realizations - 1)) : 0.0;
      result.summary.push_back(s);
    }
  }
  return result;
}

void emit_csv(const ExperimentResult& result, const std::string& prefix) {
  if (result.runs.empty()) throw Error(ErrorCode::InvalidConfig, "no results to write");
  const std::filesystem::path parent = std::filesystem::path(prefix).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create '" + parent.string() + "': " + ec.message());
  }

  const std::string runs_path = prefix + ".runs.csv";
  auto runs = open_output(runs_path);
  runs << "sweep_var,sweep_value,realization,method,utility,utility_units,eval_count,wall_ms,seed\n";
  for (const auto& r : result.runs) {
    runs << result.sweep_var << ',' << format_number(r.sweep_value) << ',' << r.realization << ','
         << to_string(r.method) << ',' << format_number(r.utility) << ',' << result.utility_units
         << ',' << r.eval_count << ',' << (r.wall_ms ? format_number(*r.wall_ms) : "") << ','
         << r.seed << '\n';
  }
  close_output(runs, runs_path);

  const std::string summary_path = prefix + ".summary.csv";
  auto summary = open_output(summary_path);
  summary << "sweep_var,sweep_value,method,mean_utility,std_utility,realizations\n";
  for (const auto& s : result.summary) {
    summary << result.sweep_var << ',' << format_number(s.sweep_value) << ','
            << to_string(s.method) << ',' << format_number(s.mean_utility) << ','
            << format_number(s.std_utility) << ',' << s.realizations << '\n';
  }
  close_output(summary, summary_path);

  const std::string trace_path = prefix + ".trace.csv";
  auto trace = open_output(trace_path);
  trace << "sweep_var,sweep_value,realization,method,round,utility_sequential,utility_gibbs,"
           "eval_count,sequential_evals,gibbs_evals,stagnation_stop\n";
  for (const auto& t : result.traces) {
    trace << result.sweep_var << ',' << format_number(t.sweep_value) << ',' << t.realization << ','
          << to_string(t.method) << ',' << t.record.round << ','
          << format_number(t.record.utility_sequential) << ','
          << format_number(t.record.utility_gibbs) << ',' << t.record.eval_count << ','
          << t.record.sequential_evals << ',' << t.record.gibbs_evals << ','
          << (t.stagnation_stop ? 1 : 0) << '\n';
  }
  close_output(trace, trace_path);
}

std::string resolve_output_prefix(const std::string& prefix) {
  const char* dir = std::getenv("MAOPT_OUTPUT_DIR");
  if (dir == nullptr || *dir == '\0') return prefix;
  return (std::filesystem::path(dir) / std::filesystem::path(prefix).filename()).string();
}

}  // namespace maopt
