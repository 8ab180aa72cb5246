#include "aoi/eval.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <omp.h>

#include "aoi/config_file.hpp"
#include "aoi/errors.hpp"

namespace aoi {

RolloutMetrics rollout(Policy& policy, const ModelConfig& config, long horizon, Rng& rng,
                       long burn_in) {
  if (horizon < 1) throw ConfigError("rollout horizon must be >= 1");
  if (burn_in < 0) throw ConfigError("burn-in must be >= 0");
  config.validate();

  RolloutMetrics m;
  m.horizon = horizon;
  m.expected_arrivals = static_cast<double>(horizon) * config.expected_arrivals_per_slot();
  double cost_sum = 0.0;

  SystemState s = initial_state(config);
  for (long t = 0; t < burn_in + horizon; ++t) {
    const Action u = policy.act(s, rng);
    if (!is_valid_action(u, config)) throw std::logic_error("policy returned an invalid action");
    StepResult r = step(s, u, config, rng);
    if (t >= burn_in) {
      for (const auto& c : s.contents) {
        const int due = due_now(c);
        m.total_served_aoi += static_cast<double>(c.aoi) * due;
        m.realized_served += due;
        m.realized_arrivals += c.arrivals;
      }
      if (u > 0) ++m.updates;
      cost_sum += r.cost;
    }
    s = std::move(r.next);
  }

  m.avg_aoi_expected_norm = m.total_served_aoi / m.expected_arrivals;
  m.avg_aoi_realized_norm =
      m.realized_served > 0 ? m.total_served_aoi / static_cast<double>(m.realized_served) : 0.0;
  m.update_freq = static_cast<double>(m.updates) / static_cast<double>(horizon);
  m.avg_cost = cost_sum / static_cast<double>(horizon);
  return m;
}

PolicyKind optimal_policy_kind(SolverSettings settings) {
  return {"optimal", [settings](const ModelConfig& config) -> PolicyFactory {
            PolicyTable table = rvia(config, settings);
            if (!table.converged) throw NumericalError("RVIA did not converge for " + canonical_text(config));
            auto actions = std::make_shared<const std::vector<Action>>(std::move(table.actions));
            return [config, actions] { return std::make_unique<TablePolicy>(config, actions); };
          }};
}

PolicyKind baseline_policy_kind(SolverSettings settings) {
  return {"baseline", [settings](const ModelConfig& config) -> PolicyFactory {
            const BaselineSolution base = solve_periodic_baseline(config, settings);
            if (!base.reduced.converged) {
              throw NumericalError("RVIA did not converge for the delta = 0 model");
            }
            auto actions = std::make_shared<const std::vector<Action>>(lift_baseline(base.reduced, config));
            return [config, actions] { return std::make_unique<TablePolicy>(config, actions); };
          }};
}

PolicyKind idle_policy_kind() {
  return {"idle", [](const ModelConfig&) -> PolicyFactory { return [] { return idle_policy(); }; }};
}

PolicyKind random_policy_kind() {
  return {"random", [](const ModelConfig& config) -> PolicyFactory {
            const int f = config.num_contents;
            return [f] { return random_policy(f); };
          }};
}

std::vector<double> default_eta_grid() { return {0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}; }

SummaryStat summarize(std::span<const double> values) {
  SummaryStat s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

SweepResult sweep(std::span<const PolicyKind> kinds, std::span<const double> eta_grid,
                  const ModelConfig& config, std::span<const std::uint64_t> seeds,
                  const SweepSettings& settings) {
  if (kinds.empty() || eta_grid.empty() || seeds.empty()) {
    throw ConfigError("sweep needs at least one policy kind, eta value and seed");
  }
  std::vector<double> etas(eta_grid.begin(), eta_grid.end());
  std::sort(etas.begin(), etas.end());

  // Factories are prepared serially (each may run a parallel solve).
  std::vector<ModelConfig> configs;
  std::vector<PolicyFactory> factories;  // [eta][kind]
  for (double eta : etas) {
    ModelConfig c = config;
    c.update_weight = eta;
    c.validate();
    configs.push_back(c);
    for (const auto& kind : kinds) factories.push_back(kind.prepare(c));
  }

  const std::size_t nk = kinds.size();
  const std::size_t ns = seeds.size();
  const std::size_t cells = etas.size() * nk * ns;
  std::vector<RolloutMetrics> metrics(cells);
  std::vector<std::exception_ptr> errors(cells);
  const int threads = settings.jobs > 0 ? settings.jobs : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t cell = 0; cell < static_cast<std::ptrdiff_t>(cells); ++cell) {
    const auto c = static_cast<std::size_t>(cell);
    const std::size_t seed_idx = c % ns;
    const std::size_t factory_idx = c / ns;
    try {
      auto policy = factories[factory_idx]();
      Rng rng(seeds[seed_idx]);
      metrics[c] = rollout(*policy, configs[factory_idx / nk], settings.horizon, rng, settings.burn_in);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SweepResult result;
  result.seeds.assign(seeds.begin(), seeds.end());
  result.config_hash = config_hash(config);
  for (std::size_t e = 0; e < etas.size(); ++e) {
    for (std::size_t k = 0; k < nk; ++k) {
      std::vector<double> aoi, aoi_r, freq, cost;
      for (std::size_t i = 0; i < ns; ++i) {
        const auto& m = metrics[(e * nk + k) * ns + i];
        aoi.push_back(m.avg_aoi_expected_norm);
        aoi_r.push_back(m.avg_aoi_realized_norm);
        freq.push_back(m.update_freq);
        cost.push_back(m.avg_cost);
      }
      result.rows.push_back({etas[e], kinds[k].name, static_cast<int>(ns), summarize(aoi),
                             summarize(aoi_r), summarize(freq), summarize(cost)});
    }
  }
  return result;
}

std::vector<FrontierPoint> frontier(const SweepResult& sweep, const std::string& policy) {
  std::vector<FrontierPoint> points;
  for (const auto& row : sweep.rows) {
    if (row.policy == policy) points.push_back({row.update_freq.mean, row.avg_aoi.mean});
  }
  std::sort(points.begin(), points.end(), [](const FrontierPoint& a, const FrontierPoint& b) {
    return a.update_freq != b.update_freq ? a.update_freq < b.update_freq : a.avg_aoi < b.avg_aoi;
  });
  auto last = std::unique(points.begin(), points.end(), [](const FrontierPoint& a, const FrontierPoint& b) {
    return a.update_freq == b.update_freq;
  });
  points.erase(last, points.end());
  return points;
}

std::optional<double> interpolate_frontier(std::span<const FrontierPoint> frontier, double freq) {
  if (frontier.empty()) return std::nullopt;
  if (freq < frontier.front().update_freq || freq > frontier.back().update_freq) return std::nullopt;
  for (std::size_t i = 0; i + 1 < frontier.size(); ++i) {
    const auto& a = frontier[i];
    const auto& b = frontier[i + 1];
    if (freq <= b.update_freq) {
      const double span = b.update_freq - a.update_freq;
      const double w = span > 0.0 ? (freq - a.update_freq) / span : 0.0;
      return a.avg_aoi + w * (b.avg_aoi - a.avg_aoi);
    }
  }
  return frontier.back().avg_aoi;
}

FrontierComparison compare_frontiers(std::span<const FrontierPoint> candidate,
                                     std::span<const FrontierPoint> baseline) {
  FrontierComparison cmp;
  for (const auto& p : candidate) {
    const auto base = interpolate_frontier(baseline, p.update_freq);
    if (!base) continue;
    ++cmp.matched_points;
    if (p.avg_aoi > *base) cmp.weakly_dominates = false;
    const double reduction = (*base - p.avg_aoi) / *base;
    if (cmp.matched_points == 1 || reduction > cmp.max_reduction) {
      cmp.max_reduction = reduction;
      cmp.freq_at_max = p.update_freq;
    }
  }
  if (cmp.matched_points == 0) cmp.weakly_dominates = false;
  return cmp;
}

}  // namespace aoi
