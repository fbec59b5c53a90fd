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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maopt/baselines.hpp"
#include "maopt/optimizer.hpp"
#include "maopt/precoding.hpp"

namespace maopt {

enum class Scenario { SingleUser, MultiUser };

enum class Method { Proposed, SequentialUpdate, Pso, Fpa, BruteForce };

enum class InitialPoint { Fpa, Random };

std::string_view to_string(Scenario s);
std::string_view to_string(Method m);

struct AlgorithmOptions {
  int rounds = 5;                         // L
  std::optional<int> gibbs_iterations;    // T, defaults to M
  std::optional<int> candidates;          // S, defaults to 3N
  int max_shift = 1;                      // J
  std::optional<double> mu;               // empty: adaptive
  InitialPoint initial = InitialPoint::Fpa;
  bool early_stop = true;
  RhoMode rho_mode = RhoMode::PowerEquality;
  double rho_tolerance = 1e-6;
};

struct PsoOptions {
  std::optional<int> swarm_size;  // defaults to 2N
  int iterations = 200;
  double inertia = 0.72;
  double cognitive = 1.49;
  double social = 1.49;
  double velocity_clamp = 0.2;
  double penalty = 1e3;
  bool share_initial = true;      // seed one particle at the shared a0
};

/// Everything one experiment needs. At most one of `points`, `lengths`,
/// `paths` may hold more than one value; that list is the sweep.
struct ExperimentConfig {
  Scenario scenario = Scenario::MultiUser;
  int users = 3;                             // K
  int antennas = 8;                          // N
  std::vector<int> points{48};               // M
  std::vector<double> lengths{0.36};         // A [m]
  std::optional<double> resolution;          // A / M, required for an A sweep
  double wavelength = 0.06;
  double min_spacing = 0.03;                 // d_min [m]
  std::vector<int> paths{9};                 // L_t
  double pathloss_exponent = 2.8;
  double reference_gain_db = -46.0;
  std::vector<double> distances{100.0, 60.0, 40.0};
  double power_dbm = 30.0;
  double noise_dbm = -80.0;
  int realizations = 200;
  std::uint64_t seed = 1;
  std::string output = "results";
  std::vector<Method> methods{Method::Proposed, Method::SequentialUpdate, Method::Pso,
                              Method::Fpa};
  AlgorithmOptions algorithm;
  PsoOptions pso;
  bool brute_force_symmetric = true;
  int threads = 1;
  bool record_timing = false;  // wall_ms stays empty otherwise, keeping output reproducible
};

/// One resolved point of the sweep.
struct SweepPoint {
  double value = 0.0;  // value of the swept variable (M, A or L_t)
  int points = 0;
  double length = 0.0;
  int paths = 0;
};

/// "M", "A", "L_t" or "none".
std::string sweep_variable(const ExperimentConfig& cfg);
std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg);

/// Parses the YAML config format; unknown keys and malformed values throw
/// InvalidConfig naming the offending key.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
void write_config(const ExperimentConfig& cfg, std::ostream& out);

/// Full validation including geometry of every sweep point. Throws Error
/// with a configuration ErrorCode.
void validate(const ExperimentConfig& cfg);

/// fig2 | fig3 | fig4 | fig5, at desk scale (200 realizations).
ExperimentConfig figure_preset(std::string_view name);

}  // namespace maopt
