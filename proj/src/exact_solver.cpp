#include "aoi/exact_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "aoi/errors.hpp"
#include "solver_detail.hpp"

namespace aoi {
namespace {

void check_settings(const SolverSettings& settings) {
  if (!(settings.span_tolerance > 0.0)) throw ConfigError("span tolerance must be positive");
  if (!(settings.aperiodicity > 0.0 && settings.aperiodicity <= 1.0)) {
    throw ConfigError("aperiodicity weight must lie in (0, 1]");
  }
  if (settings.max_iterations < 1) throw ConfigError("max_iterations must be positive");
}

void check_size(const ModelConfig& config, std::size_t max_states) {
  const std::size_t n = state_count(config);
  if (n > max_states) {
    throw CapacityError("state space has " + std::to_string(n) + " states, above the limit of " +
                        std::to_string(max_states));
  }
}

double bellman_min(const IndexedKernel& kernel, StateIndex s, std::span<const double> h) {
  double best = std::numeric_limits<double>::infinity();
  for (Action u = 0; u < kernel.num_actions(); ++u) {
    best = std::min(best, kernel.cost(s, u) + kernel.expected_next(s, u, h));
  }
  return best;
}

}  // namespace

std::vector<Action> greedy_actions(const IndexedKernel& kernel, std::span<const double> h,
                                   double tie_tolerance) {
  const auto n = static_cast<std::ptrdiff_t>(kernel.num_states());
  const int num_actions = kernel.num_actions();
  std::vector<Action> actions(kernel.num_states(), kIdle);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto s = static_cast<StateIndex>(i);
    double q[64];
    double best = std::numeric_limits<double>::infinity();
    for (Action u = 0; u < num_actions; ++u) {
      q[u] = kernel.cost(s, u) + kernel.expected_next(s, u, h);
      best = std::min(best, q[u]);
    }
    for (Action u = 0; u < num_actions; ++u) {
      if (q[u] <= best + tie_tolerance) {
        actions[s] = u;
        break;
      }
    }
  }
  return actions;
}

PolicyTable rvia(const ModelConfig& config, const SolverSettings& settings) {
  check_settings(settings);
  check_size(config, settings.max_states);
  return rvia(IndexedKernel(config), settings);
}

PolicyTable rvia(const IndexedKernel& kernel, const SolverSettings& settings) {
  check_settings(settings);
  check_size(kernel.config(), settings.max_states);
  if (kernel.num_actions() > 64) throw CapacityError("at most 63 contents are supported");

  const std::size_t n = kernel.num_states();
  const StateIndex ref = settings.reference_state.value_or(kernel.reference_state());
  if (ref >= n) throw ConfigError("reference state index out of range");
  const double tau = settings.aperiodicity;

  PolicyTable table;
  table.config = kernel.config();
  table.reference_state = ref;
  table.span_tolerance = settings.span_tolerance;

  std::vector<double> h(n, 0.0);
  std::vector<double> w(n, 0.0);
  double offset = 0.0;
  const auto count = static_cast<std::ptrdiff_t>(n);

  for (long k = 1; k <= settings.max_iterations; ++k) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const auto s = static_cast<StateIndex>(i);
      w[s] = tau * bellman_min(kernel, s, h) + (1.0 - tau) * h[s];
    }
    offset = w[ref];

    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(max : hi) reduction(min : lo)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const double next = w[i] - offset;
      const double diff = next - h[i];
      hi = std::max(hi, diff);
      lo = std::min(lo, diff);
      h[i] = next;
    }
    table.iterations = k;
    if (!std::isfinite(hi) || !std::isfinite(lo)) break;
    if (hi - lo < settings.span_tolerance) {
      table.converged = true;
      break;
    }
  }

  table.avg_cost = offset / tau;
  table.actions = greedy_actions(kernel, h, settings.tie_tolerance);
  table.relative_values = std::move(h);
  return table;
}

double bellman_residual(const IndexedKernel& kernel, const PolicyTable& table) {
  const auto count = static_cast<std::ptrdiff_t>(kernel.num_states());
  std::span<const double> h = table.relative_values;
  double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto s = static_cast<StateIndex>(i);
    worst = std::max(worst, std::abs(bellman_min(kernel, s, h) - h[s] - table.avg_cost));
  }
  return worst;
}

PolicyEvaluation policy_average_cost(const IndexedKernel& kernel, std::span<const Action> actions,
                                     const EvaluationSettings& settings) {
  const std::size_t n = kernel.num_states();
  if (actions.size() != n) throw ConfigError("policy does not cover the state space");
  for (Action u : actions) {
    if (u < 0 || u >= kernel.num_actions()) throw ConfigError("policy action out of range");
  }

  const auto offsets = kernel.offsets();
  const auto probs = kernel.probabilities();
  std::vector<double> mass(n, 0.0), next(n, 0.0);
  mass[kernel.reference_state()] = 1.0;  // the kernel's reference is the initial state

  PolicyEvaluation eval;
  bool converged = false;
  for (long k = 1; k <= settings.max_iterations; ++k) {
    for (std::size_t s = 0; s < n; ++s) next[s] = 0.5 * mass[s];
    for (std::size_t s = 0; s < n; ++s) {
      const double m = mass[s];
      if (m == 0.0) continue;
      const StateIndex b = kernel.base(s, actions[s]);
      for (std::size_t j = 0; j < offsets.size(); ++j) next[b + offsets[j]] += 0.5 * m * probs[j];
    }
    double change = 0.0;
    for (std::size_t s = 0; s < n; ++s) change += std::abs(next[s] - mass[s]);
    mass.swap(next);
    eval.iterations = k;
    if (change < settings.l1_tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NumericalError("stationary distribution did not converge within " +
                         std::to_string(settings.max_iterations) + " iterations");
  }

  for (std::size_t s = 0; s < n; ++s) {
    eval.avg_aoi += mass[s] * kernel.served_cost(s);
    if (actions[s] > 0) eval.update_freq += mass[s];
  }
  eval.avg_cost = eval.avg_aoi + kernel.update_weight() * eval.update_freq;
  return eval;
}

PolicyEvaluation policy_average_cost(const ModelConfig& config, std::span<const Action> actions,
                                     const EvaluationSettings& settings) {
  return policy_average_cost(IndexedKernel(config), actions, settings);
}

PolicyEvaluation policy_average_cost(const PolicyTable& table, const EvaluationSettings& settings) {
  return policy_average_cost(table.config, table.actions, settings);
}

std::optional<std::size_t> policy_count(const ModelConfig& config, std::size_t limit) {
  const std::size_t states = state_count(config);
  const auto actions = static_cast<std::size_t>(config.num_actions());
  std::size_t total = 1;
  for (std::size_t i = 0; i < states; ++i) {
    if (total > limit / actions) return std::nullopt;
    total *= actions;
  }
  return total;
}

namespace detail {

void decode_policy(std::size_t index, int num_actions, std::span<Action> out) {
  for (auto& a : out) {
    a = static_cast<Action>(index % num_actions);
    index /= num_actions;
  }
}

bool better_candidate(const PolicyEvaluation& cand, const PolicyEvaluation& best) {
  constexpr double kTie = 1e-12;
  if (cand.avg_cost < best.avg_cost - kTie) return true;
  if (cand.avg_cost <= best.avg_cost + kTie && cand.update_freq < best.update_freq - kTie) return true;
  return false;
}

}  // namespace detail

OracleResult enumerate_policies_oracle(const ModelConfig& config, std::size_t max_policies) {
  const auto total = policy_count(config, max_policies);
  if (!total) {
    throw CapacityError("policy enumeration needs more than " + std::to_string(max_policies) +
                        " policies");
  }
  const IndexedKernel kernel(config);
  const std::size_t n = kernel.num_states();
  std::vector<PolicyEvaluation> evals(*total);
  const auto count = static_cast<std::ptrdiff_t>(*total);

#pragma omp parallel
  {
    std::vector<Action> actions(n);
#pragma omp for schedule(dynamic, 64)
    for (std::ptrdiff_t p = 0; p < count; ++p) {
      detail::decode_policy(static_cast<std::size_t>(p), kernel.num_actions(), actions);
      evals[p] = policy_average_cost(kernel, actions);
    }
  }

  std::size_t best = 0;
  for (std::size_t p = 1; p < evals.size(); ++p) {
    if (detail::better_candidate(evals[p], evals[best])) best = p;
  }
  OracleResult result;
  result.best_policy.resize(n);
  detail::decode_policy(best, kernel.num_actions(), result.best_policy);
  result.best = evals[best];
  result.policies_evaluated = *total;
  return result;
}

BaselineSolution solve_periodic_baseline(const ModelConfig& config, const SolverSettings& settings) {
  BaselineSolution out;
  out.reduced_config = config;
  out.reduced_config.window = 0;
  SolverSettings reduced_settings = settings;
  reduced_settings.reference_state.reset();
  out.reduced = rvia(out.reduced_config, reduced_settings);
  return out;
}

std::vector<Action> lift_baseline(const PolicyTable& reduced, const ModelConfig& full_config) {
  if (reduced.config.window != 0) throw ConfigError("lift_baseline expects a delta = 0 table");
  ModelConfig expected = full_config;
  expected.window = 0;
  if (!(expected == reduced.config)) {
    throw ConfigError("baseline table was solved for a different model");
  }
  const StateSpace full(full_config);
  const StateSpace small(reduced.config);
  std::vector<Action> lifted(full.size());
  for (StateIndex s = 0; s < full.size(); ++s) {
    SystemState state = full.decode(s);
    SystemState reduced_state;
    for (const auto& c : state.contents) reduced_state.contents.push_back({c.aoi, {}, 0});
    lifted[s] = reduced.actions[small.encode(reduced_state)];
  }
  return lifted;
}

}  // namespace aoi
