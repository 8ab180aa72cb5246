// Plain loop versions of the parallel solver kernels. Tests require the
// parallel results to match these bit for bit.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "aoi/errors.hpp"
#include "aoi/exact_solver.hpp"
#include "solver_detail.hpp"

namespace aoi::serial {

PolicyTable rvia(const ModelConfig& config, const SolverSettings& settings) {
  if (!(settings.span_tolerance > 0.0)) throw ConfigError("span tolerance must be positive");
  if (!(settings.aperiodicity > 0.0 && settings.aperiodicity <= 1.0)) {
    throw ConfigError("aperiodicity weight must lie in (0, 1]");
  }
  if (state_count(config) > settings.max_states) throw CapacityError("state space too large");

  const IndexedKernel kernel(config);
  const std::size_t n = kernel.num_states();
  const StateIndex ref = settings.reference_state.value_or(kernel.reference_state());
  const double tau = settings.aperiodicity;

  PolicyTable table;
  table.config = config;
  table.reference_state = ref;
  table.span_tolerance = settings.span_tolerance;

  std::vector<double> h(n, 0.0), w(n, 0.0);
  double offset = 0.0;
  for (long k = 1; k <= settings.max_iterations; ++k) {
    for (StateIndex s = 0; s < n; ++s) {
      double best = std::numeric_limits<double>::infinity();
      for (Action u = 0; u < kernel.num_actions(); ++u) {
        best = std::min(best, kernel.cost(s, u) + kernel.expected_next(s, u, h));
      }
      w[s] = tau * best + (1.0 - tau) * h[s];
    }
    offset = w[ref];
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (StateIndex s = 0; s < n; ++s) {
      const double next = w[s] - offset;
      hi = std::max(hi, next - h[s]);
      lo = std::min(lo, next - h[s]);
      h[s] = next;
    }
    table.iterations = k;
    if (!std::isfinite(hi) || !std::isfinite(lo)) break;
    if (hi - lo < settings.span_tolerance) {
      table.converged = true;
      break;
    }
  }

  table.avg_cost = offset / tau;
  table.actions.assign(n, kIdle);
  for (StateIndex s = 0; s < n; ++s) {
    std::vector<double> q(kernel.num_actions());
    for (Action u = 0; u < kernel.num_actions(); ++u) {
      q[u] = kernel.cost(s, u) + kernel.expected_next(s, u, h);
    }
    const double best = *std::min_element(q.begin(), q.end());
    table.actions[s] = static_cast<Action>(
        std::find_if(q.begin(), q.end(), [&](double v) { return v <= best + settings.tie_tolerance; }) -
        q.begin());
  }
  table.relative_values = std::move(h);
  return table;
}

OracleResult enumerate_policies_oracle(const ModelConfig& config, std::size_t max_policies) {
  const auto total = policy_count(config, max_policies);
  if (!total) throw CapacityError("policy enumeration exceeds the guard");
  const IndexedKernel kernel(config);
  std::vector<Action> actions(kernel.num_states());

  OracleResult result;
  std::size_t best_index = 0;
  for (std::size_t p = 0; p < *total; ++p) {
    detail::decode_policy(p, kernel.num_actions(), actions);
    const PolicyEvaluation eval = policy_average_cost(kernel, actions);
    if (p == 0 || detail::better_candidate(eval, result.best)) {
      result.best = eval;
      best_index = p;
    }
  }
  result.best_policy.resize(kernel.num_states());
  detail::decode_policy(best_index, kernel.num_actions(), result.best_policy);
  result.policies_evaluated = *total;
  return result;
}

}  // namespace aoi::serial
