#pragma once

// Average-cost DQN: epsilon-greedy interaction with the simulator, FIFO
// experience replay, a periodically synced target network, and the
// relative-value loss anchored at a fixed reference state.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "aoi/agents.hpp"
#include "aoi/config_file.hpp"
#include "aoi/errors.hpp"
#include "aoi/model.hpp"
#include "aoi/neural.hpp"
#include "aoi/rng.hpp"

namespace aoi {

struct TransitionTuple {
  SystemState state;
  Action action = kIdle;
  double cost = 0.0;
  SystemState next_state;
};

/// Fixed-capacity FIFO ring. Once full, each push evicts the oldest entry.
template <typename T>
class RingBuffer {
 public:
  explicit RingBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("replay capacity must be positive");
    slots_.reserve(capacity);
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return slots_.size(); }

  void push(T item) {
    if (slots_.size() < capacity_) {
      order_.push_back(slots_.size());
      slots_.push_back(std::move(item));
    } else {
      slots_[head_] = std::move(item);
      head_ = (head_ + 1) % capacity_;
    }
  }

  /// i-th oldest entry.
  const T& operator[](std::size_t i) const { return slots_[(head_ + i) % slots_.size()]; }
  T& at_slot(std::size_t slot) { return slots_[slot]; }
  const T& at_slot(std::size_t slot) const { return slots_[slot]; }

  /// k distinct storage slots, uniformly without replacement (partial
  /// Fisher-Yates over a persistent permutation of the occupied slots).
  std::vector<std::size_t> sample_slots(std::size_t k, Rng& rng) {
    if (k > slots_.size()) throw std::invalid_argument("sample larger than the buffer");
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + rng.uniform_index(order_.size() - i);
      std::swap(order_[i], order_[j]);
    }
    return {order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(k)};
  }

  std::vector<T> sample(std::size_t k, Rng& rng) {
    std::vector<T> out;
    for (std::size_t slot : sample_slots(k, rng)) out.push_back(slots_[slot]);
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // oldest entry once full
  std::vector<T> slots_;
  std::vector<std::size_t> order_;
};

using ReplayBuffer = RingBuffer<TransitionTuple>;

struct TrainerConfig {
  int episodes = 200;          // N_epi
  int episode_steps = 3000;    // T_epi
  int target_update = 3000;    // T_update
  int batch_size = 1000;       // K_batch
  double learning_rate = 0.01; // beta
  EpsilonSchedule epsilon{0.0, 0.99, 200.0};
  std::size_t replay_capacity = 10'000;
  /// Rescales the batch gradient to at most this L2 norm; 0 disables.
  double max_grad_norm = 10.0;
  /// Defaults to initial_state().
  std::optional<SystemState> reference_state;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Trainer keys from a configuration file (episodes, episode_steps,
/// target_update, batch_size, learning_rate, epsilon_min/max/decay,
/// replay_capacity, max_grad_norm, seed); absent keys keep the defaults above.
TrainerConfig trainer_config_from(const KeyValueFile& file);

struct LossResult {
  double loss = 0.0;
  double target = 0.0;      // c + min V(S'; target) - min V(S_ref; target)
  double prediction = 0.0;  // V(S, u; policy)
  double upstream = 0.0;    // dL/d prediction = prediction - target
};

/// L = 1/2 (min_u' V(S', u'; target) - min_u' V(S_ref, u'; target)
///          - V(S, u; policy) + c)^2
/// Only the prediction carries gradient.
LossResult loss(const Parameters& policy, const Parameters& target, const TransitionTuple& tuple,
                const SystemState& reference, const ModelConfig& config);

/// Gradient of the mean loss over a batch, through the single-sample path.
std::vector<double> batch_loss_gradient(const Parameters& policy, const Parameters& target,
                                        std::span<const TransitionTuple> batch,
                                        const SystemState& reference, const ModelConfig& config,
                                        double* mean_loss = nullptr);

struct TrainingTrace {
  std::vector<double> episode_avg_cost;
  std::vector<double> episode_mean_loss;  // over the gradient steps of each episode
  double wall_seconds = 0.0;
  long gradient_steps = 0;
  long target_syncs = 0;
  long clipped_steps = 0;
  Parameters policy;
  Parameters target;
};

using EpisodeCallback = std::function<void(int episode, double avg_cost)>;

/// Runs episodes * episode_steps interaction steps as one continuing task.
/// Throws NumericalError if a batch loss becomes non-finite.
TrainingTrace train(const ModelConfig& model, const TrainerConfig& trainer,
                    const EpisodeCallback& on_episode = {});

/// argmin over the network outputs, smallest index on ties.
class GreedyNetworkPolicy final : public Policy {
 public:
  GreedyNetworkPolicy(Parameters params, ModelConfig config);
  Action act(const SystemState& s, Rng& rng) override;

 private:
  Parameters params_;
  ModelConfig config_;
  std::vector<double> x_;
};

std::unique_ptr<Policy> extract_greedy_policy(const Parameters& params, const ModelConfig& config);

/// Greedy action for every enumerated state (batched forward pass).
std::vector<Action> greedy_table(const Parameters& params, const ModelConfig& config);

}  // namespace aoi
