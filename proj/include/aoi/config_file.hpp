#pragma once

// Plain-text experiment configuration: one `key = value` per line, `#` starts
// a comment. List values (users, rates) are comma separated; a single value is
// broadcast to every content.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aoi/model.hpp"

namespace aoi {

class KeyValueFile {
 public:
  /// Keys accepted in a configuration file; anything else is rejected.
  static const std::vector<std::string>& known_keys();

  static KeyValueFile parse(std::string_view text);
  static KeyValueFile load(const std::filesystem::path& path);

  std::optional<std::string> get(std::string_view key) const;
  void set(std::string key, std::string value);
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  int get_int(std::string_view key, int fallback) const;
  std::uint64_t get_u64(std::string_view key, std::uint64_t fallback) const;
  double get_double(std::string_view key, double fallback) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Builds and validates a ModelConfig; absent keys take the shipped defaults.
ModelConfig model_config_from(const KeyValueFile& file);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

/// Stable one-line description of a model configuration.
std::string canonical_text(const ModelConfig& config);

/// 64-bit FNV-1a of canonical_text, as 16 hex digits.
std::string config_hash(const ModelConfig& config);
std::string fnv1a_hex(std::string_view text);

}  // namespace aoi
