#include "aoi/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>

#include "aoi/agents.hpp"
#include "aoi/config_file.hpp"
#include "aoi/dqn.hpp"
#include "aoi/errors.hpp"
#include "aoi/eval.hpp"
#include "aoi/exact_solver.hpp"
#include "aoi/kernel.hpp"
#include "aoi/neural.hpp"
#include "aoi/policy_io.hpp"

namespace aoi::cli {
namespace {

constexpr const char* kConfigKeysHelp =
    "Config file keys (key = value, # comments): F, delta, aoi_cap, users, rates, eta, seed, "
    "episodes, episode_steps, target_update, batch_size, learning_rate, epsilon_min, "
    "epsilon_max, epsilon_decay, replay_capacity, max_grad_norm. users/rates take one value per content "
    "or a single value for all.";

// Flags shared by the subcommands; unset optionals fall back to the config file.
struct Options {
  std::string config_path;
  std::optional<double> eta;
  std::optional<int> delta;
  std::optional<std::uint64_t> seed;
  int seeds = 30;
  long horizon = 10'000;
  long burn_in = kDefaultBurnIn;
  std::string out;
  std::string outdir;
  std::string csv;
  std::string trace;
  int jobs = 0;
  std::optional<int> episodes;
  std::optional<int> episode_steps;
  std::string policy_path;
  std::string checkpoint_path;
  std::string kind;
  int period = 1;
  std::vector<double> eta_grid;
};

struct Resolved {
  KeyValueFile file;
  ModelConfig model;
  std::uint64_t seed = 1;
};

Resolved resolve(const Options& o) {
  Resolved r;
  if (!o.config_path.empty()) r.file = KeyValueFile::load(o.config_path);
  if (o.eta) r.file.set("eta", format_double(*o.eta));
  if (o.delta) r.file.set("delta", std::to_string(*o.delta));
  r.model = model_config_from(r.file);
  r.seed = o.seed.value_or(r.file.get_u64("seed", 1));
  return r;
}

TrainerConfig resolve_trainer(const Options& o, const Resolved& r) {
  KeyValueFile file = r.file;
  if (o.episodes) file.set("episodes", std::to_string(*o.episodes));
  if (o.episode_steps) file.set("episode_steps", std::to_string(*o.episode_steps));
  TrainerConfig t = trainer_config_from(file);
  t.seed = r.seed;
  return t;
}

std::vector<std::uint64_t> rollout_seeds(std::uint64_t base, int count) {
  if (count < 1) throw ConfigError("--seeds must be >= 1");
  std::vector<std::uint64_t> seeds(count);
  for (int i = 0; i < count; ++i) seeds[i] = derive_seed(base, static_cast<std::uint64_t>(i));
  return seeds;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  return f;
}

std::vector<std::string> trainer_lines(const TrainerConfig& t) {
  return {"trainer: episodes=" + std::to_string(t.episodes) + " episode_steps=" +
          std::to_string(t.episode_steps) + " target_update=" + std::to_string(t.target_update) +
          " batch_size=" + std::to_string(t.batch_size) + " learning_rate=" +
          format_double(t.learning_rate) + " epsilon=" + format_double(t.epsilon.min) + "," +
          format_double(t.epsilon.max) + "," + format_double(t.epsilon.decay) +
          " replay_capacity=" + std::to_string(t.replay_capacity) +
          " max_grad_norm=" + format_double(t.max_grad_norm) + " seed=" + std::to_string(t.seed),
          "features: A/aoi_cap, Q/N, G/N; init: U(+-1/sqrt(fan_in)), zero biases"};
}

int cmd_solve(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o);
  const IndexedKernel kernel(r.model);
  const PolicyTable table = rvia(kernel);
  save_policy(table, o.out);
  if (!o.csv.empty()) {
    auto f = open_output(o.csv);
    write_policy_csv(table, f);
  }
  out << "config: " << canonical_text(r.model) << '\n'
      << "states=" << kernel.num_states() << " g=" << format_double(table.avg_cost)
      << " iterations=" << table.iterations << " converged=" << (table.converged ? "true" : "false")
      << " bellman_residual=" << format_double(bellman_residual(kernel, table)) << '\n';
  return table.converged ? kExitOk : kExitNumerical;
}

int cmd_oracle(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o);
  const OracleResult oracle = enumerate_policies_oracle(r.model);
  const PolicyTable table = rvia(r.model);
  out << "config: " << canonical_text(r.model) << '\n'
      << "policies=" << oracle.policies_evaluated << " oracle_cost=" << format_double(oracle.best.avg_cost)
      << " oracle_update_freq=" << format_double(oracle.best.update_freq)
      << " rvia_g=" << format_double(table.avg_cost)
      << " abs_diff=" << format_double(std::abs(oracle.best.avg_cost - table.avg_cost)) << '\n';
  return table.converged ? kExitOk : kExitNumerical;
}

int cmd_baseline(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o);
  const BaselineSolution base = solve_periodic_baseline(r.model);
  save_policy(base.reduced, o.out);
  if (!o.csv.empty()) {
    auto f = open_output(o.csv);
    write_policy_csv(base.reduced, f);
  }
  const auto lifted = lift_baseline(base.reduced, r.model);
  const PolicyEvaluation eval = policy_average_cost(r.model, lifted);
  out << "reduced: " << canonical_text(base.reduced_config) << " g=" << format_double(base.reduced.avg_cost)
      << " converged=" << (base.reduced.converged ? "true" : "false") << '\n'
      << "lifted in " << canonical_text(r.model) << ": avg_cost=" << format_double(eval.avg_cost)
      << " avg_aoi=" << format_double(eval.avg_aoi) << " update_freq=" << format_double(eval.update_freq)
      << '\n';
  return base.reduced.converged ? kExitOk : kExitNumerical;
}

int cmd_train(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o);
  const TrainerConfig t = resolve_trainer(o, r);
  const TrainingTrace trace = train(r.model, t, [&](int episode, double avg) {
    out << "episode " << episode << " avg_cost=" << format_double(avg) << '\n';
  });
  save_checkpoint({r.model, trace.policy, trace.target}, o.out);
  if (!o.trace.empty()) {
    auto f = open_output(o.trace);
    OutputHeader header = make_header(r.model, std::vector<std::uint64_t>{t.seed});
    header.extra = trainer_lines(t);
    write_trace_csv(f, trace.episode_avg_cost, header);
  }
  out << "trained " << trace.gradient_steps << " gradient steps in "
      << format_double(trace.wall_seconds) << " s\n";
  return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const int sources = !o.policy_path.empty() + !o.checkpoint_path.empty() + !o.kind.empty();
  if (sources != 1) throw ConfigError("evaluate needs exactly one of --policy, --checkpoint, --kind");

  ModelConfig model;
  std::uint64_t seed = o.seed.value_or(1);
  std::optional<std::vector<Action>> table;
  PolicyFactory factory;
  if (!o.policy_path.empty()) {
    PolicyTable loaded = load_policy(o.policy_path);
    model = loaded.config;
    auto actions = std::make_shared<const std::vector<Action>>(loaded.actions);
    table = loaded.actions;
    factory = [model, actions] { return std::make_unique<TablePolicy>(model, actions); };
  } else if (!o.checkpoint_path.empty()) {
    Checkpoint cp = load_checkpoint(o.checkpoint_path);
    model = cp.config;
    if (state_count(model) <= SolverSettings{}.max_states) table = greedy_table(cp.target, model);
    factory = [model, params = cp.target] { return extract_greedy_policy(params, model); };
  } else {
    const Resolved r = resolve(o);
    model = r.model;
    seed = r.seed;
    const int f = model.num_contents;
    if (o.kind == "idle") {
      factory = [] { return idle_policy(); };
    } else if (o.kind == "random") {
      factory = [f] { return random_policy(f); };
    } else if (o.kind == "periodic") {
      const int d = o.period;
      factory = [d, f] { return fixed_period_policy(d, f); };
    } else {
      throw ConfigError("unknown --kind '" + o.kind + "' (idle, random, periodic)");
    }
  }
  if (o.eta) model.update_weight = *o.eta;
  model.validate();

  out << "config: " << canonical_text(model) << '\n';
  const auto seeds = rollout_seeds(seed, o.seeds);
  std::vector<double> aoi, freq, cost;
  for (auto s : seeds) {
    auto policy = factory();
    Rng rng(s);
    const RolloutMetrics m = rollout(*policy, model, o.horizon, rng, o.burn_in);
    aoi.push_back(m.avg_aoi_expected_norm);
    freq.push_back(m.update_freq);
    cost.push_back(m.avg_cost);
  }
  const auto a = summarize(aoi), f = summarize(freq), c = summarize(cost);
  out << "simulated seeds=" << seeds.size() << " horizon=" << o.horizon
      << " avg_aoi=" << format_double(a.mean) << "+-" << format_double(a.std)
      << " update_freq=" << format_double(f.mean) << "+-" << format_double(f.std)
      << " avg_cost=" << format_double(c.mean) << "+-" << format_double(c.std) << '\n';
  if (table) {
    const PolicyEvaluation exact = policy_average_cost(model, *table);
    out << "exact avg_aoi=" << format_double(exact.avg_aoi)
        << " update_freq=" << format_double(exact.update_freq)
        << " avg_cost=" << format_double(exact.avg_cost) << '\n';
  }
  if (!o.out.empty()) {
    auto file = open_output(o.out);
    write_header(file, make_header(model, seeds));
    file << "avg_aoi_mean,avg_aoi_std,update_freq_mean,update_freq_std,avg_cost_mean,avg_cost_std\n"
         << format_double(a.mean) << ',' << format_double(a.std) << ',' << format_double(f.mean) << ','
         << format_double(f.std) << ',' << format_double(c.mean) << ',' << format_double(c.std) << '\n';
  }
  return kExitOk;
}

void report_frontiers(std::ostream& out, const SweepResult& result) {
  const auto opt = frontier(result, "optimal");
  const auto base = frontier(result, "baseline");
  const FrontierComparison cmp = compare_frontiers(opt, base);
  out << "frontier: matched_points=" << cmp.matched_points
      << " max_aoi_reduction=" << format_double(cmp.max_reduction)
      << " at_update_freq=" << format_double(cmp.freq_at_max)
      << " weakly_dominates=" << (cmp.weakly_dominates ? "true" : "false") << '\n';
}

void write_sweep_outputs(const std::filesystem::path& dir, const SweepResult& result,
                         const ModelConfig& model, std::span<const std::string> policies) {
  OutputHeader header = make_header(model, result.seeds);
  std::string grid = "eta_grid=";
  double last = -1.0;
  for (const auto& row : result.rows) {
    if (row.eta != last) grid += (last < 0 ? "" : ",") + format_double(row.eta);
    last = row.eta;
  }
  header.extra = {grid};
  auto s = open_output(dir / "sweep.csv");
  write_sweep_csv(s, result, header);
  auto f = open_output(dir / "frontier.csv");
  write_frontier_csv(f, result, policies, header);
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o);
  const auto seeds = rollout_seeds(r.seed, o.seeds);
  const auto grid = o.eta_grid.empty() ? default_eta_grid() : o.eta_grid;
  const std::vector<PolicyKind> kinds = {optimal_policy_kind(), baseline_policy_kind()};
  const SweepResult result = sweep(kinds, grid, r.model, seeds, {o.horizon, o.burn_in, o.jobs});
  const std::vector<std::string> policies = {"optimal", "baseline"};
  write_sweep_outputs(o.outdir, result, r.model, policies);
  report_frontiers(out, result);
  return kExitOk;
}

int cmd_reproduce(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o);
  const TrainerConfig base_trainer = resolve_trainer(o, r);
  const auto seeds = rollout_seeds(r.seed, o.seeds);
  const std::vector<double> dqn_etas = {0.5, 1.0, 2.0};
  const SweepSettings settings{o.horizon, o.burn_in, o.jobs};

  // Average cost per episode for each eta.
  std::map<double, Parameters> trained;
  std::vector<std::pair<double, std::vector<double>>> traces;
  for (std::size_t i = 0; i < dqn_etas.size(); ++i) {
    ModelConfig m = r.model;
    m.update_weight = dqn_etas[i];
    TrainerConfig t = base_trainer;
    t.seed = derive_seed(r.seed, 1000 + i);
    const TrainingTrace trace = train(m, t);
    out << "dqn eta=" << format_double(dqn_etas[i]) << " final_episode_cost="
        << format_double(trace.episode_avg_cost.back()) << '\n';
    trained.emplace(dqn_etas[i], trace.target);
    traces.emplace_back(dqn_etas[i], trace.episode_avg_cost);
  }

  const std::vector<PolicyKind> kinds = {optimal_policy_kind(), baseline_policy_kind()};
  SweepResult result = sweep(kinds, default_eta_grid(), r.model, seeds, settings);
  const PolicyKind dqn_kind{"dqn", [&trained](const ModelConfig& m) -> PolicyFactory {
                              const Parameters& p = trained.at(m.update_weight);
                              return [p, m] { return extract_greedy_policy(p, m); };
                            }};
  const SweepResult dqn_rows = sweep(std::span(&dqn_kind, 1), dqn_etas, r.model, seeds, settings);
  result.rows.insert(result.rows.end(), dqn_rows.rows.begin(), dqn_rows.rows.end());
  std::stable_sort(result.rows.begin(), result.rows.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.eta < b.eta; });

  const std::filesystem::path dir = o.outdir;
  const std::vector<std::string> policies = {"optimal", "baseline", "dqn"};
  write_sweep_outputs(dir, result, r.model, policies);

  OutputHeader header = make_header(r.model, seeds);
  header.extra = trainer_lines(base_trainer);
  header.extra.push_back("trainer seeds derived from base seed " + std::to_string(r.seed));
  auto f = open_output(dir / "trace.csv");
  write_header(f, header);
  f << "eta,episode,avg_cost\n";
  for (const auto& [eta, costs] : traces) {
    for (std::size_t e = 0; e < costs.size(); ++e) {
      f << format_double(eta) << ',' << e + 1 << ',' << format_double(costs[e]) << '\n';
    }
  }
  report_frontiers(out, result);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Queue-aware cache content update scheduling: exact MDP solver, DQN, evaluation",
               "aoi_cache"};
  app.require_subcommand(1);
  app.footer(kConfigKeysHelp);
  Options o;

  auto add_config = [&](CLI::App* c, bool required) {
    auto* opt = c->add_option("--config", o.config_path, "Key/value configuration file");
    if (required) opt->required();
    c->add_option("--eta", o.eta, "Update cost weight (overrides the config)");
    c->add_option("--delta", o.delta, "Request window in slots (overrides the config)");
    c->add_option("--seed", o.seed, "Base random seed (overrides the config)");
    c->footer(kConfigKeysHelp);
  };
  auto add_rollout = [&](CLI::App* c) {
    c->add_option("--seeds", o.seeds, "Number of rollout seeds")->capture_default_str();
    c->add_option("--horizon", o.horizon, "Slots per rollout after burn-in")->capture_default_str();
    c->add_option("--burn-in", o.burn_in, "Slots discarded before accrual")->capture_default_str();
  };
  auto add_training = [&](CLI::App* c) {
    c->add_option("--episodes", o.episodes, "Training episodes (overrides the config)");
    c->add_option("--episode-steps", o.episode_steps, "Steps per episode (overrides the config)");
  };

  auto* solve = app.add_subcommand("solve", "Solve the MDP by relative value iteration");
  add_config(solve, true);
  solve->add_option("--out", o.out, "Binary policy file")->required();
  solve->add_option("--csv", o.csv, "Also write the policy as CSV");

  auto* oracle = app.add_subcommand("oracle", "Enumerate all policies of a tiny instance");
  add_config(oracle, true);

  auto* baseline = app.add_subcommand("baseline", "Solve the delta = 0 model (periodic baseline)");
  add_config(baseline, true);
  baseline->add_option("--out", o.out, "Binary policy file for the delta = 0 table")->required();
  baseline->add_option("--csv", o.csv, "Also write the table as CSV");

  auto* trainc = app.add_subcommand("train", "Train the DQN agent");
  add_config(trainc, true);
  add_training(trainc);
  trainc->add_option("--out", o.out, "Checkpoint file")->required();
  trainc->add_option("--trace", o.trace, "Per-episode cost CSV");

  auto* evaluate = app.add_subcommand("evaluate", "Roll out a policy and report its metrics");
  add_config(evaluate, false);
  add_rollout(evaluate);
  evaluate->add_option("--policy", o.policy_path, "Binary policy file from solve");
  evaluate->add_option("--checkpoint", o.checkpoint_path, "Checkpoint file from train");
  evaluate->add_option("--kind", o.kind, "Built-in policy: idle, random, periodic");
  evaluate->add_option("--period", o.period, "Update period for --kind periodic")->capture_default_str();
  evaluate->add_option("--out", o.out, "Metrics CSV");

  auto* sweepc = app.add_subcommand("sweep", "Optimal vs periodic frontier over an eta grid");
  add_config(sweepc, true);
  add_rollout(sweepc);
  sweepc->add_option("--outdir", o.outdir, "Directory for sweep.csv and frontier.csv")->required();
  sweepc->add_option("--jobs", o.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  sweepc->add_option("--eta-grid", o.eta_grid, "Comma separated eta values")->delimiter(',');

  auto* reproduce = app.add_subcommand("reproduce", "Sweep, DQN training and traces in one run");
  add_config(reproduce, false);
  add_rollout(reproduce);
  add_training(reproduce);
  reproduce->add_option("--outdir", o.outdir, "Output directory")->required();
  reproduce->add_option("--jobs", o.jobs, "Worker threads (0 = all cores)")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUserError;
  }

  try {
    if (solve->parsed()) return cmd_solve(o, out);
    if (oracle->parsed()) return cmd_oracle(o, out);
    if (baseline->parsed()) return cmd_baseline(o, out);
    if (trainc->parsed()) return cmd_train(o, out);
    if (evaluate->parsed()) return cmd_evaluate(o, out);
    if (sweepc->parsed()) return cmd_sweep(o, out);
    if (reproduce->parsed()) return cmd_reproduce(o, out);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUserError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUserError;
  }
  return kExitUserError;
}

}  // namespace aoi::cli
