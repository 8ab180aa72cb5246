#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aoi/model.hpp"

namespace aoi {

/// The MDP in index form. Because only the arrival digits are random, every
/// (s, u) shares the same successor pattern: successor b of (s, u) is
/// base(s, u) + offset[b] with probability prob[b].
class IndexedKernel {
 public:
  explicit IndexedKernel(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  std::size_t num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  std::size_t branching() const { return offsets_.size(); }

  double served_cost(StateIndex s) const { return served_cost_[s]; }
  double update_weight() const { return config_.update_weight; }
  double cost(StateIndex s, Action u) const {
    return served_cost_[s] + (u > 0 ? config_.update_weight : 0.0);
  }
  StateIndex base(StateIndex s, Action u) const {
    return base_[s * num_actions_ + static_cast<std::size_t>(u)];
  }
  std::span<const std::size_t> offsets() const { return offsets_; }
  std::span<const double> probabilities() const { return probs_; }
  StateIndex reference_state() const { return reference_; }

  /// Expected value of h at the successor of (s, u).
  double expected_next(StateIndex s, Action u, std::span<const double> h) const {
    const StateIndex b = base(s, u);
    double acc = 0.0;
    for (std::size_t k = 0; k < offsets_.size(); ++k) acc += probs_[k] * h[b + offsets_[k]];
    return acc;
  }

 private:
  ModelConfig config_;
  std::size_t num_states_;
  int num_actions_;
  StateIndex reference_;
  std::vector<double> served_cost_;
  std::vector<StateIndex> base_;
  std::vector<std::size_t> offsets_;
  std::vector<double> probs_;
};

}  // namespace aoi
