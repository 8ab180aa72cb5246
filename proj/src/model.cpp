#include "aoi/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "aoi/errors.hpp"

namespace aoi {
namespace {

std::size_t checked_mul(std::size_t a, std::size_t b) {
  std::size_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw CapacityError("state space size overflows 64-bit indexing");
  }
  return out;
}

std::size_t content_block_size(const ModelConfig& config, int f) {
  std::size_t block = static_cast<std::size_t>(config.aoi_cap);
  const auto radix = static_cast<std::size_t>(config.users[f] + 1);
  for (int d = 0; d <= config.window; ++d) block = checked_mul(block, radix);
  return block;
}

void check_content(const ModelConfig& config, int content) {
  if (content < 1 || content > config.num_contents) {
    throw std::out_of_range("content id " + std::to_string(content) + " outside [1, " +
                            std::to_string(config.num_contents) + "]");
  }
}

}  // namespace

void ModelConfig::validate() const {
  if (num_contents < 1) throw ConfigError("F must be >= 1");
  if (window < 0) throw ConfigError("delta must be >= 0");
  if (aoi_cap < 1) throw ConfigError("aoi_cap must be >= 1");
  if (users.size() != static_cast<std::size_t>(num_contents)) {
    throw ConfigError("users must list one value per content");
  }
  if (arrival_rates.size() != static_cast<std::size_t>(num_contents)) {
    throw ConfigError("rates must list one value per content");
  }
  for (int n : users) {
    if (n < 1) throw ConfigError("every users entry must be >= 1");
  }
  for (double r : arrival_rates) {
    if (!(r > 0.0 && r < 1.0)) throw ConfigError("every rate must lie in the open interval (0, 1)");
  }
  if (!(update_weight >= 0.0) || !std::isfinite(update_weight)) {
    throw ConfigError("eta must be a finite nonnegative number");
  }
}

double ModelConfig::expected_arrivals_per_slot() const {
  double total = 0.0;
  for (int f = 0; f < num_contents; ++f) total += users[f] * arrival_rates[f];
  return total;
}

std::vector<double> arrival_pmf(const ModelConfig& config, int content) {
  check_content(config, content);
  const int n = config.users[content - 1];
  const double p = config.arrival_rates[content - 1];
  std::vector<double> pmf(n + 1);
  double binom = 1.0;  // C(n, i), built incrementally
  for (int i = 0; i <= n; ++i) {
    pmf[i] = binom * std::pow(p, i) * std::pow(1.0 - p, n - i);
    binom = binom * (n - i) / (i + 1);
  }
  return pmf;
}

int advance_aoi(int aoi, int content, Action u, int aoi_cap) {
  if (u == content) return 1;
  return std::min(aoi + 1, aoi_cap);
}

std::vector<int> shift_queues(const PerContentState& s) {
  std::vector<int> next(s.queues.size());
  if (next.empty()) return next;
  std::copy(s.queues.begin() + 1, s.queues.end(), next.begin());
  next.back() = s.arrivals;
  return next;
}

int due_now(const PerContentState& s) {
  return s.queues.empty() ? s.arrivals : s.queues.front();
}

double served_aoi_cost(const SystemState& s, const ModelConfig& config) {
  double served = 0.0;
  for (const auto& c : s.contents) served += static_cast<double>(c.aoi) * due_now(c);
  return served / config.expected_arrivals_per_slot();
}

double stage_cost(const SystemState& s, Action u, const ModelConfig& config) {
  return served_aoi_cost(s, config) + (u > 0 ? config.update_weight : 0.0);
}

namespace {

// Successor with every fresh-arrival count set to zero.
SystemState deterministic_successor(const SystemState& s, Action u, const ModelConfig& config) {
  SystemState next;
  next.contents.reserve(s.contents.size());
  for (int f = 0; f < config.num_contents; ++f) {
    const auto& c = s.contents[f];
    next.contents.push_back({advance_aoi(c.aoi, f + 1, u, config.aoi_cap), shift_queues(c), 0});
  }
  return next;
}

}  // namespace

std::vector<Successor> transition_distribution(const SystemState& s, Action u,
                                               const ModelConfig& config) {
  std::vector<std::vector<double>> pmfs;
  std::size_t count = 1;
  for (int f = 1; f <= config.num_contents; ++f) {
    pmfs.push_back(arrival_pmf(config, f));
    count *= pmfs.back().size();
  }

  const SystemState base = deterministic_successor(s, u, config);
  std::vector<Successor> out;
  out.reserve(count);
  std::vector<int> g(config.num_contents, 0);
  for (std::size_t k = 0; k < count; ++k) {
    Successor succ{base, 1.0};
    for (int f = 0; f < config.num_contents; ++f) {
      succ.state.contents[f].arrivals = g[f];
      succ.probability *= pmfs[f][g[f]];
    }
    out.push_back(std::move(succ));
    // Odometer over the arrival counts, last content fastest.
    for (int f = config.num_contents - 1; f >= 0; --f) {
      if (++g[f] <= config.users[f]) break;
      g[f] = 0;
    }
  }
  return out;
}

StepResult step(const SystemState& s, Action u, const ModelConfig& config, Rng& rng) {
  StepResult result{deterministic_successor(s, u, config), stage_cost(s, u, config)};
  for (int f = 0; f < config.num_contents; ++f) {
    const auto pmf = arrival_pmf(config, f + 1);
    result.next.contents[f].arrivals = static_cast<int>(rng.categorical(pmf));
  }
  return result;
}

SystemState initial_state(const ModelConfig& config) {
  SystemState s;
  s.contents.assign(config.num_contents,
                    PerContentState{1, std::vector<int>(config.window, 0), 0});
  return s;
}

bool is_valid_state(const SystemState& s, const ModelConfig& config) {
  if (s.contents.size() != static_cast<std::size_t>(config.num_contents)) return false;
  for (int f = 0; f < config.num_contents; ++f) {
    const auto& c = s.contents[f];
    const int n = config.users[f];
    if (c.aoi < 1 || c.aoi > config.aoi_cap) return false;
    if (c.queues.size() != static_cast<std::size_t>(config.window)) return false;
    for (int q : c.queues) {
      if (q < 0 || q > n) return false;
    }
    if (c.arrivals < 0 || c.arrivals > n) return false;
  }
  return true;
}

bool is_valid_action(Action u, const ModelConfig& config) {
  return u >= 0 && u <= config.num_contents;
}

std::size_t state_count(const ModelConfig& config) {
  config.validate();
  std::size_t total = 1;
  for (int f = 0; f < config.num_contents; ++f) {
    total = checked_mul(total, content_block_size(config, f));
  }
  return total;
}

StateSpace::StateSpace(ModelConfig config) : config_(std::move(config)) {
  size_ = state_count(config_);
  const int F = config_.num_contents;
  content_block_.resize(F);
  content_stride_.resize(F);
  arrival_stride_.resize(F);
  std::size_t stride = 1;
  for (int f = F - 1; f >= 0; --f) {
    content_block_[f] = content_block_size(config_, f);
    content_stride_[f] = stride;
    arrival_stride_[f] = stride;  // G is the least significant digit of a block
    stride *= content_block_[f];
  }
}

StateIndex StateSpace::encode(const SystemState& s) const {
  if (!is_valid_state(s, config_)) throw std::out_of_range("encode: state outside the model");
  StateIndex idx = 0;
  for (int f = 0; f < config_.num_contents; ++f) {
    const auto& c = s.contents[f];
    const std::size_t radix = config_.users[f] + 1;
    std::size_t local = static_cast<std::size_t>(c.aoi - 1);
    for (int q : c.queues) local = local * radix + q;
    local = local * radix + c.arrivals;
    idx += local * content_stride_[f];
  }
  return idx;
}

SystemState StateSpace::decode(StateIndex idx) const {
  if (idx >= size_) {
    throw std::out_of_range("decode: index " + std::to_string(idx) + " >= |S| = " +
                            std::to_string(size_));
  }
  SystemState s;
  s.contents.resize(config_.num_contents);
  for (int f = 0; f < config_.num_contents; ++f) {
    std::size_t local = (idx / content_stride_[f]) % content_block_[f];
    const std::size_t radix = config_.users[f] + 1;
    auto& c = s.contents[f];
    c.arrivals = static_cast<int>(local % radix);
    local /= radix;
    c.queues.resize(config_.window);
    for (int d = config_.window - 1; d >= 0; --d) {
      c.queues[d] = static_cast<int>(local % radix);
      local /= radix;
    }
    c.aoi = static_cast<int>(local) + 1;
  }
  return s;
}

StateIndex encode_state(const SystemState& s, const ModelConfig& config) {
  return StateSpace(config).encode(s);
}

SystemState decode_state(StateIndex idx, const ModelConfig& config) {
  return StateSpace(config).decode(idx);
}

}  // namespace aoi
