#include <ostream>

#include "aoi/config_file.hpp"
#include "aoi/eval.hpp"

namespace aoi {

OutputHeader make_header(const ModelConfig& config, std::span<const std::uint64_t> seeds) {
  return {canonical_text(config), config_hash(config), {seeds.begin(), seeds.end()}, {}};
}

void write_header(std::ostream& out, const OutputHeader& header) {
  out << "# aoi_cache " << AOI_VERSION << " rng=" << Rng::kAlgorithm << '\n'
      << "# config: " << header.config_text << '\n'
      << "# config_hash=" << header.config_hash << '\n'
      << "# seeds=";
  for (std::size_t i = 0; i < header.seeds.size(); ++i) out << (i ? "," : "") << header.seeds[i];
  out << '\n';
  for (const auto& line : header.extra) out << "# " << line << '\n';
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep, const OutputHeader& header) {
  write_header(out, header);
  out << "eta,policy,seed_count,avg_aoi_mean,avg_aoi_std,update_freq_mean,update_freq_std,"
         "avg_cost_mean,avg_cost_std,avg_aoi_realized_mean,avg_aoi_realized_std\n";
  for (const auto& r : sweep.rows) {
    out << format_double(r.eta) << ',' << r.policy << ',' << r.seed_count << ','
        << format_double(r.avg_aoi.mean) << ',' << format_double(r.avg_aoi.std) << ','
        << format_double(r.update_freq.mean) << ',' << format_double(r.update_freq.std) << ','
        << format_double(r.avg_cost.mean) << ',' << format_double(r.avg_cost.std) << ','
        << format_double(r.avg_aoi_realized.mean) << ',' << format_double(r.avg_aoi_realized.std) << '\n';
  }
}

void write_frontier_csv(std::ostream& out, const SweepResult& sweep,
                        std::span<const std::string> policies, const OutputHeader& header) {
  write_header(out, header);
  out << "policy,update_freq,avg_aoi\n";
  for (const auto& policy : policies) {
    for (const auto& p : frontier(sweep, policy)) {
      out << policy << ',' << format_double(p.update_freq) << ',' << format_double(p.avg_aoi) << '\n';
    }
  }
}

void write_trace_csv(std::ostream& out, std::span<const double> episode_costs,
                     const OutputHeader& header) {
  write_header(out, header);
  out << "episode,avg_cost\n";
  for (std::size_t i = 0; i < episode_costs.size(); ++i) {
    out << i + 1 << ',' << format_double(episode_costs[i]) << '\n';
  }
}

}  // namespace aoi
