#pragma once

#include <memory>
#include <vector>

#include "aoi/model.hpp"
#include "aoi/rng.hpp"

namespace aoi {

/// Maps the current state to an action in [0, F].
class Policy {
 public:
  virtual ~Policy() = default;
  virtual Action act(const SystemState& s, Rng& rng) = 0;
};

struct EpsilonSchedule {
  double min = 0.0;
  double max = 0.99;
  double decay = 200.0;

  void validate() const;
};

/// eps_t = eps_min + (eps_max - eps_min) exp(-t / eps_decay)
double epsilon_at(const EpsilonSchedule& schedule, long t);

/// Looks the state up in a full state-to-action table.
class TablePolicy final : public Policy {
 public:
  TablePolicy(const ModelConfig& config, std::shared_ptr<const std::vector<Action>> actions);
  Action act(const SystemState& s, Rng& rng) override;

 private:
  StateSpace space_;
  std::shared_ptr<const std::vector<Action>> actions_;
};

class IdlePolicy final : public Policy {
 public:
  Action act(const SystemState&, Rng&) override { return kIdle; }
};

/// Uniform over all F + 1 actions.
class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(int num_contents) : num_actions_(num_contents + 1) {}
  Action act(const SystemState& s, Rng& rng) override;

 private:
  int num_actions_;
};

/// Updates every d-th call, starting with the first. With F > 1 the contents
/// are updated round-robin.
class FixedPeriodPolicy final : public Policy {
 public:
  explicit FixedPeriodPolicy(int period, int num_contents = 1);
  Action act(const SystemState& s, Rng& rng) override;

 private:
  int period_;
  int num_contents_;
  long slot_ = 0;
  long updates_ = 0;
};

/// With probability eps_t a uniform action over all F + 1 actions, otherwise
/// the inner policy's action. t counts calls to act().
class EpsilonGreedyPolicy final : public Policy {
 public:
  EpsilonGreedyPolicy(std::unique_ptr<Policy> inner, EpsilonSchedule schedule, int num_contents);
  Action act(const SystemState& s, Rng& rng) override;

  long steps() const { return t_; }
  long random_actions() const { return random_actions_; }

 private:
  std::unique_ptr<Policy> inner_;
  EpsilonSchedule schedule_;
  int num_actions_;
  long t_ = 0;
  long random_actions_ = 0;
};

std::unique_ptr<Policy> table_policy(const ModelConfig& config, std::vector<Action> actions);
std::unique_ptr<Policy> idle_policy();
std::unique_ptr<Policy> random_policy(int num_contents);
std::unique_ptr<Policy> fixed_period_policy(int period, int num_contents = 1);
std::unique_ptr<Policy> epsilon_greedy(std::unique_ptr<Policy> inner, EpsilonSchedule schedule,
                                       int num_contents);

/// Queries a stateless policy on every enumerated state.
std::vector<Action> tabulate(Policy& policy, const ModelConfig& config);

}  // namespace aoi
