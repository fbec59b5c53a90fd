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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maopt/config.hpp"

namespace maopt {

struct RunRow {
  double sweep_value = 0.0;
  int realization = 0;
  Method method = Method::Proposed;
  double utility = 0.0;
  std::int64_t eval_count = 0;
  std::optional<double> wall_ms;
  std::uint64_t seed = 0;
  IndexVector solution;
  std::uint64_t channel_checksum = 0;
  bool feasible = true;
};

struct TraceRow {
  double sweep_value = 0.0;
  int realization = 0;
  Method method = Method::Proposed;
  RoundRecord record;
  bool stagnation_stop = false;
};

struct SummaryRow {
  double sweep_value = 0.0;
  Method method = Method::Proposed;
  double mean_utility = 0.0;
  double std_utility = 0.0;  // sample standard deviation, 0 for one realization
  int realizations = 0;
};

struct ExperimentResult {
  std::string sweep_var;
  std::string utility_units;  // snr_linear | bits_per_s_per_hz
  std::vector<RunRow> runs;
  std::vector<TraceRow> traces;
  std::vector<SummaryRow> summary;

  /// Mean utility of `method` at `sweep_value`; throws if absent.
  double mean(Method method, double sweep_value) const;
};

/// Seed of realization r, derived from the master seed only so that every
/// method and every sweep point sees the same channel draw.
std::uint64_t realization_seed(std::uint64_t master, int realization);

/// Validates `cfg`, then runs every method on every (sweep point,
/// realization). Each realization draws one path set and channel map shared
/// by all methods. Complexity budgets of the sequential and Gibbs phases are
/// checked on every run (InvariantViolation otherwise).
/// Channel map drawn for one realization at one sweep point, as seen by every method.
ChannelMap realization_channel(const ExperimentConfig& cfg, const SweepPoint& point,
                               int realization);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Writes <prefix>.runs.csv, <prefix>.summary.csv and <prefix>.trace.csv.
/// Throws Io on failure and InvalidConfig for an empty result.
void emit_csv(const ExperimentResult& result, const std::string& prefix);

/// Applies the MAOPT_OUTPUT_DIR override: when set, the file name part of
/// `prefix` is placed in that directory.
std::string resolve_output_prefix(const std::string& prefix);

}  // namespace maopt
