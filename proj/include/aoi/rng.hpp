#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace aoi {

/// Deterministic random stream. The engine is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; all derived variates are computed
/// here rather than through <random> distributions, which are
/// implementation-defined, so sequences match across platforms.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64/inv-cdf";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on {0, ..., n-1}; n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

  /// Draws an index from a probability vector by CDF inversion.
  std::size_t categorical(std::span<const double> probabilities);

 private:
  std::mt19937_64 engine_;
};

/// Mixes a base seed with a stream id (splitmix64 finalizer) so that
/// independent cells of an experiment get decorrelated streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace aoi
