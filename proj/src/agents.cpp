#include "aoi/agents.hpp"

#include <cmath>
#include <stdexcept>

#include "aoi/errors.hpp"

namespace aoi {

void EpsilonSchedule::validate() const {
  if (!(min >= 0.0 && max <= 1.0 && min <= max)) {
    throw ConfigError("epsilon schedule needs 0 <= eps_min <= eps_max <= 1");
  }
  if (!(decay > 0.0)) throw ConfigError("epsilon decay must be positive");
}

double epsilon_at(const EpsilonSchedule& schedule, long t) {
  if (t < 0) throw std::invalid_argument("epsilon_at: negative step");
  return schedule.min + (schedule.max - schedule.min) * std::exp(-static_cast<double>(t) / schedule.decay);
}

TablePolicy::TablePolicy(const ModelConfig& config, std::shared_ptr<const std::vector<Action>> actions)
    : space_(config), actions_(std::move(actions)) {
  if (!actions_ || actions_->size() != space_.size()) {
    throw ConfigError("policy table does not cover the state space");
  }
}

Action TablePolicy::act(const SystemState& s, Rng&) { return (*actions_)[space_.encode(s)]; }

Action RandomPolicy::act(const SystemState&, Rng& rng) {
  return static_cast<Action>(rng.uniform_index(static_cast<std::uint64_t>(num_actions_)));
}

FixedPeriodPolicy::FixedPeriodPolicy(int period, int num_contents)
    : period_(period), num_contents_(num_contents) {
  if (period < 1) throw ConfigError("update period must be >= 1");
  if (num_contents < 1) throw ConfigError("F must be >= 1");
}

Action FixedPeriodPolicy::act(const SystemState&, Rng&) {
  const bool update = slot_++ % period_ == 0;
  if (!update) return kIdle;
  return static_cast<Action>(updates_++ % num_contents_ + 1);
}

EpsilonGreedyPolicy::EpsilonGreedyPolicy(std::unique_ptr<Policy> inner, EpsilonSchedule schedule,
                                         int num_contents)
    : inner_(std::move(inner)), schedule_(schedule), num_actions_(num_contents + 1) {
  schedule_.validate();
  if (!inner_) throw std::invalid_argument("epsilon_greedy: missing inner policy");
}

Action EpsilonGreedyPolicy::act(const SystemState& s, Rng& rng) {
  const double eps = epsilon_at(schedule_, t_++);
  if (rng.uniform() < eps) {
    ++random_actions_;
    return static_cast<Action>(rng.uniform_index(static_cast<std::uint64_t>(num_actions_)));
  }
  return inner_->act(s, rng);
}

std::unique_ptr<Policy> table_policy(const ModelConfig& config, std::vector<Action> actions) {
  return std::make_unique<TablePolicy>(
      config, std::make_shared<const std::vector<Action>>(std::move(actions)));
}

std::unique_ptr<Policy> idle_policy() { return std::make_unique<IdlePolicy>(); }

std::unique_ptr<Policy> random_policy(int num_contents) {
  return std::make_unique<RandomPolicy>(num_contents);
}

std::unique_ptr<Policy> fixed_period_policy(int period, int num_contents) {
  return std::make_unique<FixedPeriodPolicy>(period, num_contents);
}

std::unique_ptr<Policy> epsilon_greedy(std::unique_ptr<Policy> inner, EpsilonSchedule schedule,
                                       int num_contents) {
  return std::make_unique<EpsilonGreedyPolicy>(std::move(inner), schedule, num_contents);
}

std::vector<Action> tabulate(Policy& policy, const ModelConfig& config) {
  const StateSpace space(config);
  Rng unused(0);
  std::vector<Action> actions(space.size());
  for (StateIndex s = 0; s < space.size(); ++s) {
    actions[s] = policy.act(space.decode(s), unused);
    if (!is_valid_action(actions[s], config)) throw std::logic_error("policy returned an invalid action");
  }
  return actions;
}

}  // namespace aoi
