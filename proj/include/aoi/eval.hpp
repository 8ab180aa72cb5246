#pragma once

// Monte Carlo rollouts, eta sweeps over policy families, and the
// AoI-versus-update-frequency frontier.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aoi/agents.hpp"
#include "aoi/exact_solver.hpp"
#include "aoi/model.hpp"
#include "aoi/rng.hpp"

namespace aoi {

inline constexpr long kDefaultBurnIn = 100;

struct RolloutMetrics {
  long horizon = 0;                // T, slots accrued after burn-in
  double total_served_aoi = 0.0;   // sum_t sum_f A_t^f Q_t^{f,0}
  double expected_arrivals = 0.0;  // T sum_f N_f lambda_f
  long realized_served = 0;        // sum_t sum_f Q_t^{f,0}
  long realized_arrivals = 0;      // sum_t sum_f G_t^f
  long updates = 0;
  double avg_aoi_expected_norm = 0.0;
  double avg_aoi_realized_norm = 0.0;
  double update_freq = 0.0;
  double avg_cost = 0.0;
};

/// Simulates burn_in + horizon slots from initial_state(); metrics accrue over
/// the last `horizon` slots only.
RolloutMetrics rollout(Policy& policy, const ModelConfig& config, long horizon, Rng& rng,
                       long burn_in = kDefaultBurnIn);

using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

/// A named policy family; prepare() is called once per eta (with the model's
/// update_weight set to that eta) and returns a thread-safe factory.
struct PolicyKind {
  std::string name;
  std::function<PolicyFactory(const ModelConfig&)> prepare;
};

/// RVIA-optimal table for the model as given.
PolicyKind optimal_policy_kind(SolverSettings settings = {});
/// Delta = 0 optimum lifted into the full model (periodic update heuristic).
PolicyKind baseline_policy_kind(SolverSettings settings = {});
PolicyKind idle_policy_kind();
PolicyKind random_policy_kind();

std::vector<double> default_eta_grid();

struct SummaryStat {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for one seed
};

SummaryStat summarize(std::span<const double> values);

struct SweepRow {
  double eta = 0.0;
  std::string policy;
  int seed_count = 0;
  SummaryStat avg_aoi;  // expected-arrival normalization
  SummaryStat avg_aoi_realized;
  SummaryStat update_freq;
  SummaryStat avg_cost;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // by eta, then policy kind order
  std::vector<std::uint64_t> seeds;
  std::string config_hash;
};

struct SweepSettings {
  long horizon = 10'000;
  long burn_in = kDefaultBurnIn;
  /// Worker threads for the rollout cells; 0 = OpenMP default.
  int jobs = 0;
};

/// Rollouts for every (eta, kind, seed) cell, in parallel across cells. Seed
/// i drives cell streams Rng(seeds[i]) for every eta and kind (common random
/// numbers). Results do not depend on `jobs`.
SweepResult sweep(std::span<const PolicyKind> kinds, std::span<const double> eta_grid,
                  const ModelConfig& config, std::span<const std::uint64_t> seeds,
                  const SweepSettings& settings = {});

struct FrontierPoint {
  double update_freq = 0.0;
  double avg_aoi = 0.0;
};

/// (update frequency, mean AoI) of one policy kind, sorted by frequency;
/// for equal frequencies only the lower AoI is kept.
std::vector<FrontierPoint> frontier(const SweepResult& sweep, const std::string& policy);

/// Piecewise-linear AoI at `freq`; nullopt outside the frontier's range.
std::optional<double> interpolate_frontier(std::span<const FrontierPoint> frontier, double freq);

struct FrontierComparison {
  int matched_points = 0;         // candidate points inside the baseline's range
  double max_reduction = 0.0;     // max (base - cand) / base over matched points
  double freq_at_max = 0.0;
  bool weakly_dominates = true;   // cand <= interpolated base at every matched point
};

FrontierComparison compare_frontiers(std::span<const FrontierPoint> candidate,
                                     std::span<const FrontierPoint> baseline);

/// Metadata written as `#` comment lines at the top of every CSV.
struct OutputHeader {
  std::string config_text;
  std::string config_hash;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> extra;
};

OutputHeader make_header(const ModelConfig& config, std::span<const std::uint64_t> seeds);

void write_header(std::ostream& out, const OutputHeader& header);
void write_sweep_csv(std::ostream& out, const SweepResult& sweep, const OutputHeader& header);
void write_frontier_csv(std::ostream& out, const SweepResult& sweep,
                        std::span<const std::string> policies, const OutputHeader& header);
/// `episode,avg_cost`
void write_trace_csv(std::ostream& out, std::span<const double> episode_costs,
                     const OutputHeader& header);

}  // namespace aoi
