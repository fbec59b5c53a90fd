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

#include "maopt/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "maopt/error.hpp"
#include "maopt/number_format.hpp"

namespace maopt {

IndexVector fpa_indices(const SamplingGrid& grid, int antennas) {
  if (antennas < 1) throw Error(ErrorCode::LayoutDoesNotFit, "need at least one antenna");
  const double steps = 0.5 * grid.wavelength * grid.points / grid.length;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps) || rounded < 1.0)
    throw Error(ErrorCode::LayoutDoesNotFit,
                "half wavelength spans " + format_number(steps) + " grid steps");
  const int spacing = static_cast<int>(rounded);
  const int start = static_cast<int>(
      std::lround(grid.points / 2.0 - (antennas - 1) * spacing / 2.0));
  const int last = start + (antennas - 1) * spacing;
  if (start < 1 || last > grid.points)
    throw Error(ErrorCode::LayoutDoesNotFit,
                std::to_string(antennas) + " antennas at spacing " + std::to_string(spacing) +
                    " do not fit on " + std::to_string(grid.points) + " points");
  IndexVector a(antennas);
  for (int n = 0; n < antennas; ++n) a[n] = start + n * spacing;
  return a;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return std::round(c);
}

BruteForceResult brute_force_optimum(int points, int antennas, int min_index_spacing,
                                     UtilityOracle& utility, bool symmetric) {
  const int base = points - (antennas - 1) * (min_index_spacing - 1);
  if (antennas < 1 || base < antennas)
    throw Error(ErrorCode::InfeasibleGeometry, "no feasible configuration exists");
  double space = binomial(base, antennas);
  if (!symmetric) space *= std::tgamma(antennas + 1.0);
  if (space > kMaxBruteForceConfigurations)
    throw Error(ErrorCode::SearchSpaceTooLarge,
                format_number(space) + " configurations exceed the 1e6 guard");

  BruteForceResult best;
  best.utility = -std::numeric_limits<double>::infinity();
  auto consider = [&](const IndexVector& a) {
    const double u = utility(a);
    ++best.configurations;
    if (u > best.utility || (u == best.utility && a < best.solution)) {
      best.utility = u;
      best.solution = a;
    }
  };

  std::vector<int> combo(antennas);
  std::iota(combo.begin(), combo.end(), 1);
  while (true) {
    IndexVector a = lift_sample(combo, min_index_spacing);
    if (symmetric) {
      consider(a);
    } else {
      do {
        consider(a);
      } while (std::next_permutation(a.begin(), a.end()));
    }
    // next ascending combination of 1..base in lexicographic order
    int i = antennas - 1;
    while (i >= 0 && combo[i] == base - antennas + 1 + i) --i;
    if (i < 0) break;
    ++combo[i];
    for (int j = i + 1; j < antennas; ++j) combo[j] = combo[j - 1] + 1;
  }
  return best;
}

PsoConfig PsoConfig::defaults_for(int antennas) {
  PsoConfig cfg;
  cfg.swarm_size = 2 * antennas;
  return cfg;
}

void PsoConfig::validate() const {
  if (swarm_size < 2) throw Error(ErrorCode::InvalidConfig, "PSO swarm_size must be >= 2");
  if (iterations < 1) throw Error(ErrorCode::InvalidConfig, "PSO iterations must be >= 1");
  if (inertia < 0 || cognitive < 0 || social < 0 || velocity_clamp < 0 || penalty < 0)
    throw Error(ErrorCode::InvalidConfig, "PSO coefficients must be non-negative");
}

PsoResult pso_optimize(UtilityOracle& utility, const SamplingGrid& grid, int antennas,
                       const PsoConfig& cfg, Rng& rng, const std::vector<IndexVector>& initial) {
  cfg.validate();
  const FeasibilityOracle feasible(grid);
  const int swarm = cfg.swarm_size;
  const double A = grid.length;
  const double vmax = cfg.velocity_clamp * A;

  auto snap = [&](const Eigen::VectorXd& x) {
    IndexVector a(antennas);
    for (int n = 0; n < antennas; ++n)
      a[n] = std::clamp(static_cast<int>(std::lround(x(n) * grid.points / A)), 1, grid.points);
    return a;
  };

  PsoResult best_feasible;
  best_feasible.utility = -std::numeric_limits<double>::infinity();
  IndexVector least_violating;
  int fewest_violations = std::numeric_limits<int>::max();

  auto objective = [&](const IndexVector& a) {
    const int violations = spacing_violations(a, grid.min_index_spacing);
    if (violations > 0) {
      if (violations < fewest_violations) {
        fewest_violations = violations;
        least_violating = a;
      }
      return -cfg.penalty * violations;
    }
    const double u = utility(a);
    if (u > best_feasible.utility) {
      best_feasible.utility = u;
      best_feasible.solution = a;
      best_feasible.feasible = true;
    }
    return u;
  };

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Eigen::VectorXd> x(swarm), v(swarm), pbest(swarm);
  std::vector<double> pbest_value(swarm);
  Eigen::VectorXd gbest;
  double gbest_value = -std::numeric_limits<double>::infinity();

  for (int i = 0; i < swarm; ++i) {
    x[i].resize(antennas);
    v[i].resize(antennas);
    if (i < static_cast<int>(initial.size())) {
      for (int n = 0; n < antennas; ++n) x[i](n) = grid.position(initial[i][n]);
      v[i].setZero();
    } else {
      for (int n = 0; n < antennas; ++n) {
        x[i](n) = A * unit(rng);
        v[i](n) = vmax * (2.0 * unit(rng) - 1.0);
      }
    }
    pbest[i] = x[i];
    pbest_value[i] = objective(snap(x[i]));
    if (pbest_value[i] > gbest_value) {
      gbest_value = pbest_value[i];
      gbest = x[i];
    }
  }

  for (int it = 0; it < cfg.iterations; ++it) {
    for (int i = 0; i < swarm; ++i) {
      for (int n = 0; n < antennas; ++n) {
        const double r1 = unit(rng);
        const double r2 = unit(rng);
        double vel = cfg.inertia * v[i](n) + cfg.cognitive * r1 * (pbest[i](n) - x[i](n)) +
                     cfg.social * r2 * (gbest(n) - x[i](n));
        vel = std::clamp(vel, -vmax, vmax);
        v[i](n) = vel;
        x[i](n) = std::clamp(x[i](n) + vel, 0.0, A);
      }
      const double value = objective(snap(x[i]));
      if (value > pbest_value[i]) {
        pbest_value[i] = value;
        pbest[i] = x[i];
      }
      if (value > gbest_value) {
        gbest_value = value;
        gbest = x[i];
      }
    }
  }

  if (best_feasible.feasible) return best_feasible;
  PsoResult fallback;
  fallback.solution = least_violating;
  fallback.utility = -cfg.penalty * fewest_violations;
  fallback.feasible = false;
  return fallback;
}

}  // namespace maopt
