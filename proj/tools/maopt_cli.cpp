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

// maopt: movable-antenna position optimization simulator.
//
//   maopt run --config exp.yaml [--seed N] [--out prefix]
//   maopt preset --name fig2|fig3|fig4|fig5 [--realizations N] [--full]
//   maopt brute --config exp.yaml
//   maopt validate --config exp.yaml
//
// Exit codes: 0 success, 2 configuration error, 3 runtime failure.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "maopt/config.hpp"
#include "maopt/error.hpp"
#include "maopt/harness.hpp"
#include "maopt/number_format.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<int> realizations;
  bool timing = false;
};

void apply(const Overrides& o, maopt::ExperimentConfig& cfg) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.output = *o.out;
  if (o.threads) cfg.threads = *o.threads;
  if (o.realizations) cfg.realizations = *o.realizations;
  if (o.timing) cfg.record_timing = true;
}

void print_summary(const maopt::ExperimentResult& result, const std::string& prefix) {
  std::cout << "sweep " << result.sweep_var << ", utility in " << result.utility_units << '\n';
  for (const auto& s : result.summary)
    std::cout << "  " << result.sweep_var << '=' << maopt::format_number(s.sweep_value) << "  "
              << maopt::to_string(s.method) << "  mean " << maopt::format_number(s.mean_utility)
              << "  std " << maopt::format_number(s.std_utility) << "  (n=" << s.realizations
              << ")\n";
  std::cout << "wrote " << prefix << ".{runs,summary,trace}.csv\n";
}

int execute(const maopt::ExperimentConfig& cfg) {
  const auto result = maopt::run_experiment(cfg);
  const auto prefix = maopt::resolve_output_prefix(cfg.output);
  maopt::emit_csv(result, prefix);
  print_summary(result, prefix);
  return 0;
}

void add_run_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Master seed (overrides the config)");
  cmd->add_option("--out", o.out, "Output prefix for the CSV files");
  cmd->add_option("--threads", o.threads, "Worker threads across realizations")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--timing", o.timing, "Record wall_ms (output is then not reproducible)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Movable-antenna position optimization via discrete sampling"};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset_name;
  bool full_scale = false;
  bool dump_config = false;
  Overrides overrides;

  auto* run = app.add_subcommand("run", "Run an experiment from a config file");
  run->add_option("--config", config_path, "YAML experiment config")->required();
  add_run_options(run, overrides);

  auto* preset = app.add_subcommand("preset", "Run a figure preset (fig2..fig5)");
  preset->add_option("--name", preset_name, "fig2 | fig3 | fig4 | fig5")->required();
  preset->add_option("--realizations", overrides.realizations, "Realizations per sweep point")
      ->check(CLI::PositiveNumber);
  preset->add_flag("--full", full_scale, "Use 1000 realizations");
  preset->add_flag("--dump-config", dump_config, "Print the preset as YAML and exit");
  add_run_options(preset, overrides);

  auto* brute = app.add_subcommand("brute", "Run a config with the brute-force oracle included");
  brute->add_option("--config", config_path, "YAML experiment config")->required();
  add_run_options(brute, overrides);

  auto* validate = app.add_subcommand("validate", "Check a config file without running it");
  validate->add_option("--config", config_path, "YAML experiment config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      auto cfg = maopt::load_config(config_path);
      apply(overrides, cfg);
      return execute(cfg);
    }
    if (*preset) {
      auto cfg = maopt::figure_preset(preset_name);
      if (full_scale) cfg.realizations = 1000;
      apply(overrides, cfg);
      if (dump_config) {
        maopt::write_config(cfg, std::cout);
        return 0;
      }
      return execute(cfg);
    }
    if (*brute) {
      auto cfg = maopt::load_config(config_path);
      apply(overrides, cfg);
      if (std::find(cfg.methods.begin(), cfg.methods.end(), maopt::Method::BruteForce) ==
          cfg.methods.end())
        cfg.methods.push_back(maopt::Method::BruteForce);
      return execute(cfg);
    }
    if (*validate) {
      const auto cfg = maopt::load_config(config_path);
      maopt::validate(cfg);
      const auto points = maopt::sweep_points(cfg);
      std::cout << "config ok: " << maopt::to_string(cfg.scenario) << ", sweep "
                << maopt::sweep_variable(cfg) << " over " << points.size() << " point(s), "
                << cfg.realizations << " realizations\n";
      return 0;
    }
  } catch (const maopt::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return maopt::is_config_error(e.code()) ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
