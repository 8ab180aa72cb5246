#pragma once

// Exact average-cost solution of the cache update MDP by relative value
// iteration, exact evaluation of fixed policies, and a brute-force policy
// enumeration oracle for tiny instances.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "aoi/kernel.hpp"
#include "aoi/model.hpp"

namespace aoi {

struct SolverSettings {
  double span_tolerance = 1e-9;
  long max_iterations = 1'000'000;
  /// Defaults to the index of initial_state().
  std::optional<StateIndex> reference_state;
  /// Aperiodicity transform weight tau in (0, 1]: iterates on
  /// tau * P + (1 - tau) * I, which leaves g and h unchanged but keeps
  /// periodic optimal chains (e.g. threshold policies) from oscillating.
  double aperiodicity = 0.5;
  /// Actions whose Bellman value is within this of the minimum count as tied;
  /// ties go to the smallest action index.
  double tie_tolerance = 1e-9;
  std::size_t max_states = 10'000'000;
};

struct PolicyTable {
  ModelConfig config;
  std::vector<Action> actions;          // indexed by StateIndex
  std::vector<double> relative_values;  // h, with h[reference_state] = 0
  double avg_cost = 0.0;                // g
  StateIndex reference_state = 0;
  long iterations = 0;
  bool converged = false;
  double span_tolerance = 0.0;

  friend bool operator==(const PolicyTable&, const PolicyTable&) = default;
};

/// Relative value iteration; the per-state Bellman sweep runs under OpenMP.
/// Throws CapacityError if |S| exceeds settings.max_states. Non-convergence is
/// reported through PolicyTable::converged with the last iterate.
PolicyTable rvia(const ModelConfig& config, const SolverSettings& settings = {});
PolicyTable rvia(const IndexedKernel& kernel, const SolverSettings& settings = {});

/// max_s | min_u [c(s,u) + E h(s')] - h(s) - g |
double bellman_residual(const IndexedKernel& kernel, const PolicyTable& table);

/// Greedy actions with respect to h (smallest index within tie_tolerance).
std::vector<Action> greedy_actions(const IndexedKernel& kernel, std::span<const double> h,
                                   double tie_tolerance);

struct EvaluationSettings {
  double l1_tolerance = 1e-12;
  long max_iterations = 10'000'000;
};

struct PolicyEvaluation {
  double avg_cost = 0.0;     // long-run mean stage cost
  double avg_aoi = 0.0;      // long-run mean served-AoI term (expected-arrival normalized)
  double update_freq = 0.0;  // long-run fraction of slots with an update
  long iterations = 0;
};

/// Exact long-run averages of a stationary deterministic policy started from
/// initial_state(). The occupation measure is found by power iteration on the
/// lazy chain (P + I) / 2, which has the same stationary law and converges even
/// when the policy's chain is periodic. Throws NumericalError on
/// non-convergence.
PolicyEvaluation policy_average_cost(const IndexedKernel& kernel, std::span<const Action> actions,
                                     const EvaluationSettings& settings = {});
PolicyEvaluation policy_average_cost(const ModelConfig& config, std::span<const Action> actions,
                                     const EvaluationSettings& settings = {});
PolicyEvaluation policy_average_cost(const PolicyTable& table,
                                     const EvaluationSettings& settings = {});

struct OracleResult {
  std::vector<Action> best_policy;
  PolicyEvaluation best;
  std::size_t policies_evaluated = 0;
};

/// Evaluates every stationary deterministic policy (|U|^|S| of them, at most
/// max_policies) and returns the cheapest. Among policies within 1e-12 of the
/// minimum the lowest update frequency wins, then the lowest enumeration
/// index. Policies are evaluated in parallel; the selection scan is serial.
OracleResult enumerate_policies_oracle(const ModelConfig& config,
                                       std::size_t max_policies = 1'000'000);

struct BaselineSolution {
  ModelConfig reduced_config;  // same parameters with delta = 0
  PolicyTable reduced;
};

/// Optimal policy of the delta = 0 model, i.e. the periodic update heuristic.
BaselineSolution solve_periodic_baseline(const ModelConfig& config,
                                         const SolverSettings& settings = {});

/// Applies a delta = 0 table inside a model with the given (larger) window:
/// the action depends only on the AoI components.
std::vector<Action> lift_baseline(const PolicyTable& reduced, const ModelConfig& full_config);

namespace serial {

/// Single-threaded reference implementations kept for cross-checking.
PolicyTable rvia(const ModelConfig& config, const SolverSettings& settings = {});
OracleResult enumerate_policies_oracle(const ModelConfig& config,
                                       std::size_t max_policies = 1'000'000);

}  // namespace serial

/// |U|^|S|, or nullopt when it exceeds `limit`.
std::optional<std::size_t> policy_count(const ModelConfig& config, std::size_t limit);

}  // namespace aoi
