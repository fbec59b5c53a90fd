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
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "maopt/grid_channel.hpp"

namespace maopt {

struct IndexVectorHash {
  std::size_t operator()(const IndexVector& a) const noexcept {
    std::size_t h = 0xcbf29ce484222325ull;
    for (int v : a) h = (h ^ static_cast<std::size_t>(v)) * 0x100000001b3ull;
    return h;
  }
};

/// Feasibility oracle for index vectors: every entry in 1..M and pairwise
/// |a_i - a_j| >= a_min. An optional extra predicate models further
/// position constraints; random candidates violating it are redrawn.
struct FeasibilityOracle {
  int points = 0;             // M
  int min_index_spacing = 1;  // a_min
  std::function<bool(const IndexVector&)> extra;

  FeasibilityOracle() = default;
  FeasibilityOracle(int points, int min_index_spacing,
                    std::function<bool(const IndexVector&)> extra = {})
      : points(points), min_index_spacing(min_index_spacing), extra(std::move(extra)) {}
  explicit FeasibilityOracle(const SamplingGrid& grid)
      : points(grid.points), min_index_spacing(grid.min_index_spacing) {}

  bool in_range(int m) const { return m >= 1 && m <= points; }
  bool spacing_ok(const IndexVector& a) const;
  bool operator()(const IndexVector& a) const;
};

/// Number of pairs (i < j) closer than a_min.
int spacing_violations(const IndexVector& a, int min_index_spacing);

/// Wraps a utility U(a, W(a)) with memoization and an evaluation counter.
/// Only fresh evaluations increment eval_count; cache hits are free.
class UtilityOracle {
 public:
  using Function = std::function<double(const IndexVector&)>;

  explicit UtilityOracle(Function f, bool memoize = true)
      : f_(std::move(f)), memoize_(memoize) {}

  double evaluate(const IndexVector& a);
  double operator()(const IndexVector& a) { return evaluate(a); }

  std::int64_t eval_count() const { return eval_count_; }

  /// Called with every vector handed to the underlying function.
  void set_observer(std::function<void(const IndexVector&)> observer) {
    observer_ = std::move(observer);
  }

 private:
  Function f_;
  bool memoize_;
  std::int64_t eval_count_ = 0;
  std::unordered_map<IndexVector, double, IndexVectorHash> cache_;
  std::function<void(const IndexVector&)> observer_;
};

struct AlgorithmConfig {
  int rounds = 2;            // L
  int gibbs_iterations = 1;  // T
  int candidates = 3;        // S
  int max_shift = 1;         // J
  /// Fixed Gibbs scaling; empty selects the adaptive rule
  /// mu = 5 / (max_s U_s - min_s U_s + 1e-9) per iteration.
  std::optional<double> mu;
  std::uint64_t seed = 0;
  bool gibbs_phase = true;   // false gives plain sequential update
  bool early_stop = true;

  /// S = 3N, T = M, J = 1.
  static AlgorithmConfig defaults_for(int antennas, int points, int rounds = 2);

  /// Throws InvalidConfig for L, T, S, J < 1 or a negative mu.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Sequential update

/// Psi: indices m in 1..M keeping |m - a_j| >= a_min to every antenna j != n
/// of `current` (updated prefix and frozen suffix alike). `n` is 0-based.
std::vector<int> feasibility_set(int n, const IndexVector& current,
                                 const FeasibilityOracle& feasible);

struct SequentialRound {
  IndexVector solution;
  double utility = 0.0;
  bool changed = false;
  /// Utility after each coordinate update, non-decreasing.
  std::vector<double> coordinate_utilities;
};

/// One round: each coordinate in order 1..N moves to the argmax of U over
/// its feasibility set. Ties keep the incumbent, otherwise the lowest index
/// wins.
SequentialRound sequential_update_round(const IndexVector& previous, UtilityOracle& utility,
                                        const FeasibilityOracle& feasible);

// ---------------------------------------------------------------------------
// Gibbs sampling phase

/// Feasible single-coordinate shifts a_n -/+ j, j = 1..J, in the order
/// (n, j, -), (n, j, +). Out-of-range shifts count as infeasible.
std::vector<IndexVector> adjacent_candidates(const IndexVector& a, int max_shift,
                                             const FeasibilityOracle& feasible);

/// Adds (n-1)(a_min-1) to the n-th smallest entry of an ascending sample.
IndexVector lift_sample(std::span<const int> ascending, int min_index_spacing);

/// `count` uniformly random feasible ascending vectors: N distinct ascending
/// draws from 1..M-(N-1)(a_min-1), then lifted. Throws InfeasibleGeometry
/// when M - (N-1)(a_min-1) < N.
std::vector<IndexVector> random_feasible(int points, int antennas, int min_index_spacing,
                                         int count, Rng& rng);

/// exp(mu U_s) / sum exp(mu U_s'), via log-sum-exp.
std::vector<double> selection_probabilities(std::span<const double> utilities, double mu);

/// First s whose cumulative probability reaches p (p in (0, 1]).
std::size_t select_index(std::span<const double> probabilities, double p);

double adaptive_mu(std::span<const double> utilities);

struct GibbsChoice {
  std::size_t index = 0;
  std::vector<double> probabilities;
};

/// Draws p uniform on (0, 1] and applies select_index.
GibbsChoice gibbs_select(std::span<const double> utilities, double mu, Rng& rng);

IndexVector gibbs_select(std::span<const IndexVector> candidates, UtilityOracle& utility,
                         double mu, Rng& rng);

/// Bookkeeping of one Gibbs iteration, exposed for inspection.
struct GsState {
  int iteration = 0;
  std::vector<IndexVector> history;        // E(t)
  std::vector<double> history_utilities;
  std::vector<IndexVector> adjacent;       // B(t)
  std::vector<IndexVector> random;         // D(t)
  std::vector<double> probabilities;       // over B(t) followed by D(t)
  double mu = 0.0;
};

struct GibbsResult {
  IndexVector solution;
  double utility = 0.0;
  std::int64_t fresh_evaluations = 0;
};

/// T Gibbs iterations starting from `start`; returns the best member of the
/// history E(T), which always contains `start` (earliest wins ties).
GibbsResult gibbs_phase(const IndexVector& start, UtilityOracle& utility,
                        const AlgorithmConfig& cfg, const FeasibilityOracle& feasible, Rng& rng,
                        const std::function<void(const GsState&)>& observer = {});

// ---------------------------------------------------------------------------
// Full framework

struct RoundRecord {
  int round = 0;
  double utility_sequential = 0.0;
  double utility_gibbs = 0.0;
  std::int64_t eval_count = 0;  // cumulative, fresh evaluations only
  std::int64_t sequential_evals = 0;
  std::int64_t gibbs_evals = 0;
};

struct AlgorithmResult {
  IndexVector solution;
  double utility = 0.0;
  std::vector<RoundRecord> trace;
  bool stagnation_stop = false;
};

/// Alternates sequential update and the Gibbs phase for L rounds. Throws
/// InfeasibleInitial when a0 breaks the spacing constraint.
AlgorithmResult run_algorithm_1(const IndexVector& initial, UtilityOracle& utility,
                                const AlgorithmConfig& cfg, const FeasibilityOracle& feasible,
                                Rng& rng);

AlgorithmResult run_algorithm_1(const IndexVector& initial, UtilityOracle& utility,
                                const AlgorithmConfig& cfg, const FeasibilityOracle& feasible);

}  // namespace maopt
