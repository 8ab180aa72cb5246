#include "aoi/dqn.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "aoi/errors.hpp"

namespace aoi {

void TrainerConfig::validate() const {
  if (episodes < 1 || episode_steps < 1 || target_update < 1 || batch_size < 1) {
    throw ConfigError("episodes, episode_steps, target_update and batch_size must be positive");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be positive");
  }
  if (!(max_grad_norm >= 0.0) || !std::isfinite(max_grad_norm)) {
    throw ConfigError("max_grad_norm must be a finite nonnegative number");
  }
  if (replay_capacity < static_cast<std::size_t>(batch_size)) {
    throw ConfigError("replay_capacity must be at least batch_size");
  }
  epsilon.validate();
}

TrainerConfig trainer_config_from(const KeyValueFile& file) {
  TrainerConfig t;
  t.episodes = file.get_int("episodes", t.episodes);
  t.episode_steps = file.get_int("episode_steps", t.episode_steps);
  t.target_update = file.get_int("target_update", t.target_update);
  t.batch_size = file.get_int("batch_size", t.batch_size);
  t.learning_rate = file.get_double("learning_rate", t.learning_rate);
  t.epsilon.min = file.get_double("epsilon_min", t.epsilon.min);
  t.epsilon.max = file.get_double("epsilon_max", t.epsilon.max);
  t.epsilon.decay = file.get_double("epsilon_decay", t.epsilon.decay);
  t.replay_capacity = file.get_u64("replay_capacity", t.replay_capacity);
  t.max_grad_norm = file.get_double("max_grad_norm", t.max_grad_norm);
  t.seed = file.get_u64("seed", t.seed);
  t.validate();
  return t;
}

namespace {

double min_value(const Parameters& params, std::span<const double> x) {
  const auto v = forward(params, x);
  return v[argmin_action(v)];
}

}  // namespace

LossResult loss(const Parameters& policy, const Parameters& target, const TransitionTuple& tuple,
                const SystemState& reference, const ModelConfig& config) {
  LossResult r;
  r.target = tuple.cost + min_value(target, features(tuple.next_state, config)) -
             min_value(target, features(reference, config));
  r.prediction = forward(policy, features(tuple.state, config)).at(tuple.action);
  const double err = r.target - r.prediction;
  r.loss = 0.5 * err * err;
  r.upstream = -err;
  return r;
}

std::vector<double> batch_loss_gradient(const Parameters& policy, const Parameters& target,
                                        std::span<const TransitionTuple> batch,
                                        const SystemState& reference, const ModelConfig& config,
                                        double* mean_loss) {
  std::vector<double> grad(policy.values.size(), 0.0);
  double total = 0.0;
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (const auto& tuple : batch) {
    const LossResult r = loss(policy, target, tuple, reference, config);
    total += r.loss;
    const auto g = backward(policy, features(tuple.state, config), tuple.action, r.upstream * scale);
    for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += g[k];
  }
  if (mean_loss) *mean_loss = total * scale;
  return grad;
}

namespace {

struct Experience {
  TransitionTuple tuple;
  std::vector<double> x;
  std::vector<double> x_next;
  // min_u V(S', u; target) for the target generation it was computed under.
  double next_min = 0.0;
  long generation = -1;
};

}  // namespace

TrainingTrace train(const ModelConfig& model, const TrainerConfig& trainer,
                    const EpisodeCallback& on_episode) {
  model.validate();
  trainer.validate();
  const auto start = std::chrono::steady_clock::now();

  Rng init_rng(derive_seed(trainer.seed, 0));
  Rng env_rng(derive_seed(trainer.seed, 1));
  Rng explore_rng(derive_seed(trainer.seed, 2));
  Rng replay_rng(derive_seed(trainer.seed, 3));

  const NetworkShape shape = NetworkShape::for_model(model);
  const int input_dim = shape.input_dim;
  const int num_actions = model.num_actions();
  const SystemState reference = trainer.reference_state.value_or(initial_state(model));
  if (!is_valid_state(reference, model)) throw ConfigError("reference state outside the model");
  const std::vector<double> reference_x = features(reference, model);

  TrainingTrace trace;
  trace.policy = init_uniform(shape, init_rng);
  trace.target = copy_parameters(trace.policy);
  long generation = 0;
  double reference_min = min_value(trace.target, reference_x);

  RingBuffer<Experience> replay(trainer.replay_capacity);
  BatchNetwork policy_net;
  BatchNetwork target_net;
  const auto K = static_cast<std::size_t>(trainer.batch_size);
  Eigen::MatrixXd batch_x(input_dim, static_cast<Eigen::Index>(K));
  Eigen::MatrixXd stale_x;
  std::vector<int> batch_actions(K);
  std::vector<double> batch_targets(K);
  std::vector<double> upstream(K);
  std::vector<double> gradient(trace.policy.values.size());
  std::vector<std::size_t> stale;

  SystemState state = initial_state(model);
  std::vector<double> x = features(state, model);
  const long total_steps = static_cast<long>(trainer.episodes) * trainer.episode_steps;
  double episode_cost = 0.0;
  double episode_loss = 0.0;
  long episode_updates = 0;

  for (long t = 0; t < total_steps; ++t) {
    // Observe, select, act, store.
    Action u;
    if (explore_rng.uniform() < epsilon_at(trainer.epsilon, t)) {
      u = static_cast<Action>(explore_rng.uniform_index(static_cast<std::uint64_t>(num_actions)));
    } else {
      u = argmin_action(forward(trace.policy, x));
    }
    StepResult result = step(state, u, model, env_rng);
    episode_cost += result.cost;
    std::vector<double> x_next = features(result.next, model);
    replay.push(Experience{{state, u, result.cost, result.next}, x, x_next, 0.0, -1});
    state = std::move(result.next);
    x = std::move(x_next);

    if (replay.size() >= K) {
      const auto slots = replay.sample_slots(K, replay_rng);
      stale.clear();
      for (std::size_t k = 0; k < K; ++k) {
        const Experience& e = replay.at_slot(slots[k]);
        if (e.generation != generation) stale.push_back(slots[k]);
      }
      if (!stale.empty()) {
        stale_x.resize(input_dim, static_cast<Eigen::Index>(stale.size()));
        for (std::size_t k = 0; k < stale.size(); ++k) {
          const auto& xn = replay.at_slot(stale[k]).x_next;
          stale_x.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Eigen::VectorXd>(xn.data(), input_dim);
        }
        const Eigen::MatrixXd& values = target_net.forward(trace.target, stale_x);
        for (std::size_t k = 0; k < stale.size(); ++k) {
          Experience& e = replay.at_slot(stale[k]);
          e.next_min = values.col(static_cast<Eigen::Index>(k)).minCoeff();
          e.generation = generation;
        }
      }

      for (std::size_t k = 0; k < K; ++k) {
        const Experience& e = replay.at_slot(slots[k]);
        batch_x.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Eigen::VectorXd>(e.x.data(), input_dim);
        batch_actions[k] = e.tuple.action;
        batch_targets[k] = e.tuple.cost + e.next_min - reference_min;
      }
      const Eigen::MatrixXd& predictions = policy_net.forward(trace.policy, batch_x);
      double batch_loss = 0.0;
      const double scale = 1.0 / static_cast<double>(K);
      for (std::size_t k = 0; k < K; ++k) {
        const double err = batch_targets[k] - predictions(batch_actions[k], static_cast<Eigen::Index>(k));
        batch_loss += 0.5 * err * err;
        upstream[k] = -err * scale;
      }
      batch_loss *= scale;
      if (!std::isfinite(batch_loss)) {
        throw NumericalError("non-finite DQN loss at step " + std::to_string(t) + " (episode " +
                             std::to_string(t / trainer.episode_steps) + ")");
      }
      std::fill(gradient.begin(), gradient.end(), 0.0);
      policy_net.accumulate_gradient(trace.policy, batch_actions, upstream, gradient);
      if (trainer.max_grad_norm > 0.0) {
        double sq = 0.0;
        for (double g : gradient) sq += g * g;
        const double norm = std::sqrt(sq);
        if (norm > trainer.max_grad_norm) {
          const double shrink = trainer.max_grad_norm / norm;
          for (double& g : gradient) g *= shrink;
          ++trace.clipped_steps;
        }
      }
      sgd_apply(trace.policy, gradient, trainer.learning_rate);
      ++trace.gradient_steps;
      episode_loss += batch_loss;
      ++episode_updates;
    }

    if ((t + 1) % trainer.target_update == 0) {
      trace.target = copy_parameters(trace.policy);
      ++generation;
      ++trace.target_syncs;
      reference_min = min_value(trace.target, reference_x);
    }

    if ((t + 1) % trainer.episode_steps == 0) {
      const double avg = episode_cost / trainer.episode_steps;
      trace.episode_avg_cost.push_back(avg);
      trace.episode_mean_loss.push_back(episode_updates > 0 ? episode_loss / episode_updates : 0.0);
      if (on_episode) on_episode(static_cast<int>(trace.episode_avg_cost.size()), avg);
      episode_cost = 0.0;
      episode_loss = 0.0;
      episode_updates = 0;
    }
  }

  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

GreedyNetworkPolicy::GreedyNetworkPolicy(Parameters params, ModelConfig config)
    : params_(std::move(params)), config_(std::move(config)) {
  if (params_.shape.input_dim != NetworkShape::for_model(config_).input_dim ||
      params_.shape.output_dim != config_.num_actions()) {
    throw ConfigError("network shape does not fit the model");
  }
  x_.resize(params_.shape.input_dim);
}

Action GreedyNetworkPolicy::act(const SystemState& s, Rng&) {
  features_into(s, config_, x_);
  return argmin_action(forward(params_, x_));
}

std::unique_ptr<Policy> extract_greedy_policy(const Parameters& params, const ModelConfig& config) {
  return std::make_unique<GreedyNetworkPolicy>(params, config);
}

std::vector<Action> greedy_table(const Parameters& params, const ModelConfig& config) {
  const StateSpace space(config);
  const int input_dim = params.shape.input_dim;
  std::vector<Action> actions(space.size());
  constexpr std::size_t kChunk = 4096;
  BatchNetwork net;
  std::vector<double> x(input_dim);
  for (std::size_t first = 0; first < space.size(); first += kChunk) {
    const std::size_t n = std::min(kChunk, space.size() - first);
    Eigen::MatrixXd inputs(input_dim, static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
      features_into(space.decode(first + k), config, x);
      inputs.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Eigen::VectorXd>(x.data(), input_dim);
    }
    const Eigen::MatrixXd& out = net.forward(params, inputs);
    for (std::size_t k = 0; k < n; ++k) {
      const auto col = out.col(static_cast<Eigen::Index>(k));
      actions[first + k] = argmin_action(std::span<const double>(col.data(), col.size()));
    }
  }
  return actions;
}

}  // namespace aoi
