#include "aoi/policy_io.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

#include "aoi/binary_io.hpp"
#include "aoi/config_file.hpp"
#include "aoi/errors.hpp"

namespace aoi {

void write_model_block(std::ostream& out, const ModelConfig& config) {
  binary::put<std::int32_t>(out, config.num_contents);
  binary::put<std::int32_t>(out, config.window);
  binary::put<std::int32_t>(out, config.aoi_cap);
  for (int n : config.users) binary::put<std::int32_t>(out, n);
  for (double r : config.arrival_rates) binary::put<double>(out, r);
  binary::put<double>(out, config.update_weight);
}

ModelConfig read_model_block(std::istream& in) {
  ModelConfig config;
  config.num_contents = binary::get<std::int32_t>(in);
  if (config.num_contents < 1 || config.num_contents > 64) throw ConfigError("corrupt model block");
  config.window = binary::get<std::int32_t>(in);
  config.aoi_cap = binary::get<std::int32_t>(in);
  config.users.resize(config.num_contents);
  config.arrival_rates.resize(config.num_contents);
  for (auto& n : config.users) n = binary::get<std::int32_t>(in);
  for (auto& r : config.arrival_rates) r = binary::get<double>(in);
  config.update_weight = binary::get<double>(in);
  config.validate();
  return config;
}

void save_policy(const PolicyTable& table, std::ostream& out) {
  out.write("AOIPTBL1", 8);
  binary::put<std::uint32_t>(out, kPolicyFormatVersion);
  write_model_block(out, table.config);
  binary::put<std::uint64_t>(out, table.actions.size());
  binary::put<double>(out, table.avg_cost);
  binary::put<std::uint64_t>(out, table.reference_state);
  binary::put<std::int64_t>(out, table.iterations);
  binary::put<std::uint8_t>(out, table.converged ? 1 : 0);
  binary::put<double>(out, table.span_tolerance);
  for (Action a : table.actions) binary::put<std::int32_t>(out, a);
  for (double h : table.relative_values) binary::put<double>(out, h);
}

void save_policy(const PolicyTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  save_policy(table, out);
  if (!out) throw ConfigError("write failed for " + path.string());
}

PolicyTable load_policy(std::istream& in) {
  binary::expect_magic(in, "AOIPTBL1");
  const auto version = binary::get<std::uint32_t>(in);
  if (version != kPolicyFormatVersion) {
    throw ConfigError("unsupported policy file version " + std::to_string(version));
  }
  PolicyTable table;
  table.config = read_model_block(in);
  const auto n = binary::get<std::uint64_t>(in);
  if (n != state_count(table.config)) throw ConfigError("policy size does not match its model");
  table.avg_cost = binary::get<double>(in);
  table.reference_state = binary::get<std::uint64_t>(in);
  table.iterations = binary::get<std::int64_t>(in);
  table.converged = binary::get<std::uint8_t>(in) != 0;
  table.span_tolerance = binary::get<double>(in);
  table.actions.resize(n);
  table.relative_values.resize(n);
  for (auto& a : table.actions) {
    a = binary::get<std::int32_t>(in);
    if (!is_valid_action(a, table.config)) throw ConfigError("policy file has an invalid action");
  }
  for (auto& h : table.relative_values) h = binary::get<double>(in);
  return table;
}

PolicyTable load_policy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return load_policy(in);
}

void write_policy_csv(const PolicyTable& table, std::ostream& out) {
  out << "# config: " << canonical_text(table.config) << '\n'
      << "# config_hash=" << config_hash(table.config) << " g=" << format_double(table.avg_cost)
      << " eta=" << format_double(table.config.update_weight) << " iterations=" << table.iterations
      << " tolerance=" << format_double(table.span_tolerance)
      << " converged=" << (table.converged ? "true" : "false") << '\n'
      << "state_index,action,h_value\n";
  for (std::size_t s = 0; s < table.actions.size(); ++s) {
    out << s << ',' << table.actions[s] << ',' << format_double(table.relative_values[s]) << '\n';
  }
}

}  // namespace aoi
