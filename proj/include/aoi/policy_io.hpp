#pragma once

#include <filesystem>
#include <iosfwd>

#include "aoi/exact_solver.hpp"

namespace aoi {

/// Binary layout (little-endian), version 1:
///   "AOIPTBL1" | u32 version | model block | u64 |S| | f64 g | u64 reference
///   | i64 iterations | u8 converged | f64 span tolerance | i32[|S|] actions
///   | f64[|S|] h
/// The model block is i32 F, i32 delta, i32 aoi_cap, i32[F] users,
/// f64[F] rates, f64 eta.
inline constexpr std::uint32_t kPolicyFormatVersion = 1;

void write_model_block(std::ostream& out, const ModelConfig& config);
ModelConfig read_model_block(std::istream& in);

void save_policy(const PolicyTable& table, const std::filesystem::path& path);
void save_policy(const PolicyTable& table, std::ostream& out);
PolicyTable load_policy(const std::filesystem::path& path);
PolicyTable load_policy(std::istream& in);

/// `state_index,action,h_value` rows under a `#` header carrying the config,
/// its hash, g, eta, iteration count and tolerance.
void write_policy_csv(const PolicyTable& table, std::ostream& out);

}  // namespace aoi
