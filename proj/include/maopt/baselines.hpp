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
#include <vector>

#include "maopt/grid_channel.hpp"
#include "maopt/optimizer.hpp"

namespace maopt {

/// Fixed-position array: N elements at half-wavelength spacing centred on
/// the region. Spacing in grid steps is (lambda/2) M / A, start index is
/// round(M/2 - (N-1) spacing / 2). Throws LayoutDoesNotFit when the spacing
/// is not a whole number of steps or the layout leaves 1..M.
IndexVector fpa_indices(const SamplingGrid& grid, int antennas);

struct BruteForceResult {
  IndexVector solution;
  double utility = 0.0;
  std::int64_t configurations = 0;
};

inline constexpr double kMaxBruteForceConfigurations = 1e6;

/// C(n, k) in floating point (saturates instead of overflowing).
double binomial(int n, int k);

/// Exhaustive search over every feasible configuration. With `symmetric` the
/// utility is assumed permutation invariant and only ascending vectors are
/// enumerated; otherwise every ordering is tried. Ties go to the
/// lexicographically smallest vector. Throws SearchSpaceTooLarge above 1e6
/// configurations and InfeasibleGeometry when nothing fits.
BruteForceResult brute_force_optimum(int points, int antennas, int min_index_spacing,
                                     UtilityOracle& utility, bool symmetric = true);

struct PsoConfig {
  int swarm_size = 2;
  int iterations = 200;
  double inertia = 0.72;
  double cognitive = 1.49;
  double social = 1.49;
  double velocity_clamp = 0.2;  // fraction of the region length A
  double penalty = 1e3;         // per violated pair
  std::uint64_t seed = 0;

  /// swarm_size = 2N, everything else at the canonical constriction values.
  static PsoConfig defaults_for(int antennas);
  void validate() const;
};

struct PsoResult {
  IndexVector solution;
  double utility = 0.0;
  bool feasible = false;
};

/// Global-best PSO over continuous positions in [0, A]^N. Positions snap to
/// the nearest grid index for evaluation; infeasible snapped vectors score
/// -penalty * violated pairs and never reach the utility oracle. Particles
/// listed in `initial` start there with zero velocity, the rest start
/// uniformly at random.
PsoResult pso_optimize(UtilityOracle& utility, const SamplingGrid& grid, int antennas,
                       const PsoConfig& cfg, Rng& rng,
                       const std::vector<IndexVector>& initial = {});

}  // namespace maopt
