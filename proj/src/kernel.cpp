#include "aoi/kernel.hpp"

namespace aoi {

IndexedKernel::IndexedKernel(const ModelConfig& config)
    : config_(config), num_states_(0), num_actions_(config.num_actions()) {
  const StateSpace space(config_);
  num_states_ = space.size();
  reference_ = space.encode(initial_state(config_));

  // Arrival combinations, last content fastest (same order as
  // transition_distribution).
  offsets_ = {0};
  probs_ = {1.0};
  for (int f = 1; f <= config_.num_contents; ++f) {
    const auto pmf = arrival_pmf(config_, f);
    const std::size_t stride = space.arrival_stride(f);
    std::vector<std::size_t> offsets;
    std::vector<double> probs;
    for (std::size_t k = 0; k < offsets_.size(); ++k) {
      for (std::size_t g = 0; g < pmf.size(); ++g) {
        offsets.push_back(offsets_[k] + g * stride);
        probs.push_back(probs_[k] * pmf[g]);
      }
    }
    offsets_ = std::move(offsets);
    probs_ = std::move(probs);
  }

  served_cost_.resize(num_states_);
  base_.resize(num_states_ * num_actions_);
  for (StateIndex s = 0; s < num_states_; ++s) {
    const SystemState state = space.decode(s);
    served_cost_[s] = served_aoi_cost(state, config_);
    for (Action u = 0; u < num_actions_; ++u) {
      SystemState next = state;
      for (int f = 0; f < config_.num_contents; ++f) {
        auto& c = next.contents[f];
        const auto& old = state.contents[f];
        c.aoi = advance_aoi(old.aoi, f + 1, u, config_.aoi_cap);
        c.queues = shift_queues(old);
        c.arrivals = 0;
      }
      base_[s * num_actions_ + u] = space.encode(next);
    }
  }
}

}  // namespace aoi
