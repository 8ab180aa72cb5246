#pragma once

// Queue-aware cache update MDP: F cached contents, each with an AoI counter,
// a window of Delta request queues and a fresh-arrival count. One update per
// slot; an update resets the content's AoI to 1 from the next slot on.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "aoi/rng.hpp"

namespace aoi {

/// 0 = idle, f in [1, F] = update content f.
using Action = int;
inline constexpr Action kIdle = 0;

using StateIndex = std::size_t;

struct ModelConfig {
  int num_contents = 1;              // F
  int window = 4;                    // Delta, slots between request and due time
  int aoi_cap = 50;                  // A-hat
  std::vector<int> users{2};         // N_f
  std::vector<double> arrival_rates{0.5};  // lambda_f, open interval (0, 1)
  double update_weight = 0.0;        // eta

  /// Throws ConfigError when any field is out of its domain.
  void validate() const;

  int num_actions() const { return num_contents + 1; }

  /// Sum_f N_f lambda_f, the expected number of requests due per slot.
  double expected_arrivals_per_slot() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Per-content state (A, Q^0, ..., Q^{Delta-1}, G).
struct PerContentState {
  int aoi = 1;
  std::vector<int> queues;  // queues[d] = requests due d slots from now
  int arrivals = 0;         // G, due Delta slots from now

  friend bool operator==(const PerContentState&, const PerContentState&) = default;
};

struct SystemState {
  std::vector<PerContentState> contents;

  friend bool operator==(const SystemState&, const SystemState&) = default;
};

struct Successor {
  SystemState state;
  double probability = 0.0;
};

struct StepResult {
  SystemState next;
  double cost = 0.0;
};

/// Binomial(N_f, lambda_f) probabilities for content f (1-based).
std::vector<double> arrival_pmf(const ModelConfig& config, int content);

/// AoI of content f after action u: reset to 1 on update, else saturating +1.
int advance_aoi(int aoi, int content, Action u, int aoi_cap);

/// Queue vector of the successor; the fresh arrivals move into the last slot.
std::vector<int> shift_queues(const PerContentState& s);

/// Requests served this slot. With Delta = 0 the fresh arrivals are due now.
int due_now(const PerContentState& s);

/// Served-AoI term of the stage cost: Sum_f A^f Q^{f,0} / Sum_f N_f lambda_f.
double served_aoi_cost(const SystemState& s, const ModelConfig& config);

/// c(S, u, eta) = served_aoi_cost + eta * 1{u > 0}, using the pre-update AoI.
double stage_cost(const SystemState& s, Action u, const ModelConfig& config);

/// All successors with nonzero probability. Only the G components vary.
std::vector<Successor> transition_distribution(const SystemState& s, Action u,
                                               const ModelConfig& config);

/// Samples one transition. The returned cost is evaluated before the update.
StepResult step(const SystemState& s, Action u, const ModelConfig& config, Rng& rng);

/// A = 1 and empty queues for every content.
SystemState initial_state(const ModelConfig& config);

bool is_valid_state(const SystemState& s, const ModelConfig& config);
bool is_valid_action(Action u, const ModelConfig& config);

/// Mixed-radix bijection between SystemState and [0, |S|). Digits follow the
/// flattened tuple (A^1, Q^{1,0}, ..., G^1, A^2, ...), most significant first,
/// so indices are increasing in lexicographic state order.
class StateSpace {
 public:
  /// Throws CapacityError if |S| overflows 64 bits.
  explicit StateSpace(ModelConfig config);

  const ModelConfig& config() const { return config_; }
  std::size_t size() const { return size_; }

  StateIndex encode(const SystemState& s) const;
  SystemState decode(StateIndex idx) const;

  /// Index step of one unit in content f's (1-based) arrival digit.
  std::size_t arrival_stride(int content) const { return arrival_stride_[content - 1]; }

 private:
  ModelConfig config_;
  std::size_t size_ = 0;
  std::vector<std::size_t> content_block_;   // states per content block
  std::vector<std::size_t> content_stride_;  // index weight of a content block
  std::vector<std::size_t> arrival_stride_;
};

/// |S| = prod_f A-hat (N_f + 1)^(Delta + 1); throws CapacityError on overflow.
std::size_t state_count(const ModelConfig& config);

StateIndex encode_state(const SystemState& s, const ModelConfig& config);
SystemState decode_state(StateIndex idx, const ModelConfig& config);

}  // namespace aoi
