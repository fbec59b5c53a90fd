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

#include "maopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_set>

#include "maopt/error.hpp"

namespace maopt {

bool FeasibilityOracle::spacing_ok(const IndexVector& a) const {
  for (int m : a)
    if (!in_range(m)) return false;
  return spacing_violations(a, min_index_spacing) == 0;
}

bool FeasibilityOracle::operator()(const IndexVector& a) const {
  return spacing_ok(a) && (!extra || extra(a));
}

int spacing_violations(const IndexVector& a, int min_index_spacing) {
  int count = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      if (std::abs(a[i] - a[j]) < min_index_spacing) ++count;
  return count;
}

double UtilityOracle::evaluate(const IndexVector& a) {
  if (memoize_) {
    if (auto it = cache_.find(a); it != cache_.end()) return it->second;
  }
  if (observer_) observer_(a);
  const double u = f_(a);
  ++eval_count_;
  if (memoize_) cache_.emplace(a, u);
  return u;
}

AlgorithmConfig AlgorithmConfig::defaults_for(int antennas, int points, int rounds) {
  AlgorithmConfig cfg;
  cfg.rounds = rounds;
  cfg.gibbs_iterations = points;
  cfg.candidates = 3 * antennas;
  cfg.max_shift = 1;
  return cfg;
}

void AlgorithmConfig::validate() const {
  if (rounds < 1) throw Error(ErrorCode::InvalidConfig, "rounds (L) must be >= 1");
  if (gibbs_iterations < 1) throw Error(ErrorCode::InvalidConfig, "gibbs_iterations (T) must be >= 1");
  if (candidates < 1) throw Error(ErrorCode::InvalidConfig, "candidates (S) must be >= 1");
  if (max_shift < 1) throw Error(ErrorCode::InvalidConfig, "max_shift (J) must be >= 1");
  if (mu && !(*mu >= 0.0)) throw Error(ErrorCode::InvalidConfig, "mu must be >= 0");
}

std::vector<int> feasibility_set(int n, const IndexVector& current,
                                 const FeasibilityOracle& feasible) {
  std::vector<int> out;
  for (int m = 1; m <= feasible.points; ++m) {
    bool ok = true;
    for (std::size_t j = 0; j < current.size() && ok; ++j)
      if (static_cast<int>(j) != n && std::abs(m - current[j]) < feasible.min_index_spacing)
        ok = false;
    if (!ok) continue;
    if (feasible.extra) {
      IndexVector trial = current;
      trial[n] = m;
      if (!feasible.extra(trial)) continue;
    }
    out.push_back(m);
  }
  return out;
}

SequentialRound sequential_update_round(const IndexVector& previous, UtilityOracle& utility,
                                        const FeasibilityOracle& feasible) {
  SequentialRound round;
  round.solution = previous;
  IndexVector& a = round.solution;
  double best = utility(a);

  for (int n = 0; n < static_cast<int>(a.size()); ++n) {
    const int incumbent = a[n];
    int best_index = incumbent;
    for (int m : feasibility_set(n, a, feasible)) {
      if (m == incumbent) continue;
      a[n] = m;
      const double u = utility(a);
      if (u > best) {
        best = u;
        best_index = m;
      }
    }
    a[n] = best_index;
    if (best_index != incumbent) round.changed = true;
    round.coordinate_utilities.push_back(best);
  }
  round.utility = best;
  return round;
}

std::vector<IndexVector> adjacent_candidates(const IndexVector& a, int max_shift,
                                             const FeasibilityOracle& feasible) {
  std::vector<IndexVector> out;
  for (std::size_t n = 0; n < a.size(); ++n) {
    for (int j = 1; j <= max_shift; ++j) {
      for (int sign : {-1, 1}) {
        IndexVector shifted = a;
        shifted[n] += sign * j;
        if (feasible(shifted)) out.push_back(std::move(shifted));
      }
    }
  }
  return out;
}

IndexVector lift_sample(std::span<const int> ascending, int min_index_spacing) {
  IndexVector out(ascending.begin(), ascending.end());
  for (std::size_t n = 0; n < out.size(); ++n)
    out[n] += static_cast<int>(n) * (min_index_spacing - 1);
  return out;
}

std::vector<IndexVector> random_feasible(int points, int antennas, int min_index_spacing,
                                         int count, Rng& rng) {
  const int base = points - (antennas - 1) * (min_index_spacing - 1);
  if (antennas < 1 || min_index_spacing < 1 || base < antennas)
    throw Error(ErrorCode::InfeasibleGeometry,
                std::to_string(antennas) + " antennas with spacing " +
                    std::to_string(min_index_spacing) + " do not fit on " +
                    std::to_string(points) + " points");

  std::vector<int> population(base);
  std::iota(population.begin(), population.end(), 1);
  std::vector<IndexVector> out;
  out.reserve(count);
  std::vector<int> draw(antennas);
  for (int i = 0; i < count; ++i) {
    std::sample(population.begin(), population.end(), draw.begin(), antennas, rng);
    out.push_back(lift_sample(draw, min_index_spacing));
  }
  return out;
}

std::vector<double> selection_probabilities(std::span<const double> utilities, double mu) {
  std::vector<double> p(utilities.size());
  if (utilities.empty()) return p;
  double peak = -std::numeric_limits<double>::infinity();
  for (double u : utilities) peak = std::max(peak, mu * u);
  double total = 0.0;
  for (std::size_t s = 0; s < utilities.size(); ++s) {
    p[s] = std::exp(mu * utilities[s] - peak);
    total += p[s];
  }
  for (double& v : p) v /= total;
  return p;
}

std::size_t select_index(std::span<const double> probabilities, double p) {
  double cumulative = 0.0;
  for (std::size_t s = 0; s < probabilities.size(); ++s) {
    cumulative += probabilities[s];
    if (p <= cumulative) return s;
  }
  // rounding left the total just below p
  return probabilities.size() - 1;
}

double adaptive_mu(std::span<const double> utilities) {
  const auto [lo, hi] = std::minmax_element(utilities.begin(), utilities.end());
  return 5.0 / (*hi - *lo + 1e-9);
}

GibbsChoice gibbs_select(std::span<const double> utilities, double mu, Rng& rng) {
  GibbsChoice choice;
  choice.probabilities = selection_probabilities(utilities, mu);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double p = 1.0 - uniform(rng);  // (0, 1]
  choice.index = select_index(choice.probabilities, p);
  return choice;
}

IndexVector gibbs_select(std::span<const IndexVector> candidates, UtilityOracle& utility,
                         double mu, Rng& rng) {
  std::vector<double> u;
  u.reserve(candidates.size());
  for (const auto& c : candidates) u.push_back(utility(c));
  return candidates[gibbs_select(u, mu, rng).index];
}

GibbsResult gibbs_phase(const IndexVector& start, UtilityOracle& utility,
                        const AlgorithmConfig& cfg, const FeasibilityOracle& feasible, Rng& rng,
                        const std::function<void(const GsState&)>& observer) {
  constexpr int kExtraDraws = 50;
  const std::int64_t evals_before = utility.eval_count();
  const int antennas = static_cast<int>(start.size());

  GsState state;
  state.history.push_back(start);
  state.history_utilities.push_back(utility(start));
  IndexVector current = start;

  for (int t = 1; t <= cfg.gibbs_iterations; ++t) {
    state.iteration = t;
    state.adjacent = adjacent_candidates(current, cfg.max_shift, feasible);
    if (static_cast<int>(state.adjacent.size()) > cfg.candidates)
      state.adjacent.resize(cfg.candidates);

    std::unordered_set<IndexVector, IndexVectorHash> seen(state.adjacent.begin(),
                                                          state.adjacent.end());
    state.random.clear();
    const int needed = cfg.candidates - static_cast<int>(state.adjacent.size());
    for (int draws = 0; static_cast<int>(seen.size()) < cfg.candidates && draws < needed + kExtraDraws;
         ++draws) {
      auto v = std::move(random_feasible(feasible.points, antennas, feasible.min_index_spacing, 1,
                                         rng)
                             .front());
      if (feasible.extra && !feasible.extra(v)) continue;
      if (seen.insert(v).second) state.random.push_back(std::move(v));
    }

    std::vector<IndexVector> candidates = state.adjacent;
    candidates.insert(candidates.end(), state.random.begin(), state.random.end());
    std::vector<double> u;
    u.reserve(candidates.size());
    for (const auto& c : candidates) u.push_back(utility(c));

    state.mu = cfg.mu ? *cfg.mu : adaptive_mu(u);
    auto choice = gibbs_select(u, state.mu, rng);
    state.probabilities = std::move(choice.probabilities);
    current = candidates[choice.index];
    state.history.push_back(current);
    state.history_utilities.push_back(u[choice.index]);
    if (observer) observer(state);
  }

  const auto best = std::max_element(state.history_utilities.begin(),
                                     state.history_utilities.end()) -
                    state.history_utilities.begin();
  return GibbsResult{state.history[best], state.history_utilities[best],
                     utility.eval_count() - evals_before};
}

AlgorithmResult run_algorithm_1(const IndexVector& initial, UtilityOracle& utility,
                                const AlgorithmConfig& cfg, const FeasibilityOracle& feasible,
                                Rng& rng) {
  cfg.validate();
  if (initial.empty() || !feasible(initial))
    throw Error(ErrorCode::InfeasibleInitial, "initial index vector violates the constraints");

  AlgorithmResult result;
  IndexVector a = initial;
  double u = 0.0;
  for (int l = 1; l <= cfg.rounds; ++l) {
    RoundRecord rec;
    rec.round = l;
    const std::int64_t before = utility.eval_count();
    auto su = sequential_update_round(a, utility, feasible);
    rec.utility_sequential = su.utility;
    rec.sequential_evals = utility.eval_count() - before;

    if (cfg.gibbs_phase) {
      auto gs = gibbs_phase(su.solution, utility, cfg, feasible, rng);
      a = std::move(gs.solution);
      u = gs.utility;
      rec.gibbs_evals = gs.fresh_evaluations;
    } else {
      a = su.solution;
      u = su.utility;
    }
    rec.utility_gibbs = u;
    rec.eval_count = utility.eval_count();
    result.trace.push_back(rec);

    if (cfg.early_stop && l < cfg.rounds && !su.changed && a == su.solution) {
      result.stagnation_stop = true;
      break;
    }
  }
  result.solution = std::move(a);
  result.utility = u;
  return result;
}

AlgorithmResult run_algorithm_1(const IndexVector& initial, UtilityOracle& utility,
                                const AlgorithmConfig& cfg, const FeasibilityOracle& feasible) {
  Rng rng(cfg.seed);
  return run_algorithm_1(initial, utility, cfg, feasible, rng);
}

}  // namespace maopt
