#include "aoi/config_file.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "aoi/errors.hpp"

namespace aoi {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("config key '" + std::string(key) + "': cannot parse '" + std::string(text) + "'");
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view key, std::string_view text, int count) {
  std::vector<T> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                          : comma - start);
    values.push_back(parse_number<T>(key, piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (values.size() == 1 && count > 1) values.assign(count, values.front());
  if (values.size() != static_cast<std::size_t>(count)) {
    throw ConfigError("config key '" + std::string(key) + "' needs 1 or " + std::to_string(count) +
                      " values");
  }
  return values;
}

}  // namespace

const std::vector<std::string>& KeyValueFile::known_keys() {
  static const std::vector<std::string> keys = {
      "F",          "delta",        "aoi_cap",       "users",       "rates",
      "eta",        "seed",         "episodes",      "episode_steps", "target_update",
      "batch_size", "learning_rate", "epsilon_min",  "epsilon_max", "epsilon_decay",
      "replay_capacity", "max_grad_norm"};
  return keys;
}

KeyValueFile KeyValueFile::parse(std::string_view text) {
  KeyValueFile file;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                          : nl - pos);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
      }
      file.set(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return file;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

void KeyValueFile::set(std::string key, std::string value) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
    throw ConfigError("unknown config key '" + key + "'");
  }
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

std::optional<std::string> KeyValueFile::get(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

int KeyValueFile::get_int(std::string_view key, int fallback) const {
  const auto v = get(key);
  return v ? parse_number<int>(key, *v) : fallback;
}

std::uint64_t KeyValueFile::get_u64(std::string_view key, std::uint64_t fallback) const {
  const auto v = get(key);
  return v ? parse_number<std::uint64_t>(key, *v) : fallback;
}

double KeyValueFile::get_double(std::string_view key, double fallback) const {
  const auto v = get(key);
  return v ? parse_number<double>(key, *v) : fallback;
}

ModelConfig model_config_from(const KeyValueFile& file) {
  ModelConfig config;
  config.num_contents = file.get_int("F", config.num_contents);
  if (config.num_contents < 1) throw ConfigError("F must be >= 1");
  config.window = file.get_int("delta", config.window);
  config.aoi_cap = file.get_int("aoi_cap", config.aoi_cap);
  config.users = parse_list<int>("users", file.get("users").value_or("2"), config.num_contents);
  config.arrival_rates =
      parse_list<double>("rates", file.get("rates").value_or("0.5"), config.num_contents);
  config.update_weight = file.get_double("eta", config.update_weight);
  config.validate();
  return config;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string canonical_text(const ModelConfig& config) {
  auto join = [](const auto& values, auto&& fmt) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out += ',';
      out += fmt(values[i]);
    }
    return out;
  };
  return "F=" + std::to_string(config.num_contents) + " delta=" + std::to_string(config.window) +
         " aoi_cap=" + std::to_string(config.aoi_cap) +
         " users=" + join(config.users, [](int v) { return std::to_string(v); }) +
         " rates=" + join(config.arrival_rates, [](double v) { return format_double(v); }) +
         " eta=" + format_double(config.update_weight);
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const ModelConfig& config) { return fnv1a_hex(canonical_text(config)); }

}  // namespace aoi
