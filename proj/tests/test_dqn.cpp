#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "aoi/dqn.hpp"
#include "aoi/eval.hpp"

using namespace aoi;

namespace {

ModelConfig model(double eta = 1.0) {
  ModelConfig c;
  c.window = 2;
  c.aoi_cap = 10;
  c.update_weight = eta;
  return c;
}

TrainerConfig small_trainer() {
  TrainerConfig t;
  t.episodes = 4;
  t.episode_steps = 250;
  t.target_update = 100;
  t.batch_size = 32;
  t.learning_rate = 0.01;
  t.epsilon = {0.0, 0.99, 50.0};
  t.replay_capacity = 500;
  t.seed = 3;
  return t;
}

TransitionTuple random_tuple(const ModelConfig& c, Rng& rng) {
  const auto n = state_count(c);
  return {decode_state(rng.uniform_index(n), c), static_cast<Action>(rng.uniform_index(2)),
          5.0 * rng.uniform(), decode_state(rng.uniform_index(n), c)};
}

}  // namespace

TEST(Loss, ZeroNetworks) {
  const auto c = model();
  const auto zero = zero_parameters(NetworkShape::for_model(c));
  const TransitionTuple t{initial_state(c), 1, 5.0, initial_state(c)};
  const auto r = loss(zero, zero, t, initial_state(c), c);
  EXPECT_DOUBLE_EQ(r.loss, 12.5);
  EXPECT_DOUBLE_EQ(r.upstream, -5.0);
}

TEST(Loss, FixedPointHasZeroGradient) {
  const auto c = model();
  Rng rng(4);
  const auto shape = NetworkShape::for_model(c);
  auto policy = init_uniform(shape, rng);
  const auto target = init_uniform(shape, rng);
  auto t = random_tuple(c, rng);
  const auto r0 = loss(policy, target, t, initial_state(c), c);
  // shift the selected output bias so the prediction hits the target exactly
  policy.values[policy.values.size() - 2 + t.action] += r0.target - r0.prediction;
  const auto r = loss(policy, target, t, initial_state(c), c);
  EXPECT_NEAR(r.loss, 0.0, 1e-24);
  std::vector<TransitionTuple> one{t};
  for (double g : batch_loss_gradient(policy, target, one, initial_state(c), c)) EXPECT_NEAR(g, 0.0, 1e-12);
}

TEST(Loss, TargetNetworkCarriesNoGradient) {
  const auto c = model();
  Rng rng(5);
  const auto shape = NetworkShape::for_model(c);
  const auto policy = init_uniform(shape, rng);
  const auto target = init_uniform(shape, rng);
  auto target2 = init_uniform(shape, rng);
  const auto t = random_tuple(c, rng);
  const auto a = loss(policy, target, t, initial_state(c), c);
  const auto b = loss(policy, target2, t, initial_state(c), c);
  EXPECT_EQ(a.prediction, b.prediction);
  // gradient only differs through the scalar upstream
  const auto ga = backward(policy, features(t.state, c), t.action, a.upstream);
  const auto gb = backward(policy, features(t.state, c), t.action, b.upstream);
  const auto unit = backward(policy, features(t.state, c), t.action, 1.0);
  for (std::size_t k = 0; k < ga.size(); ++k) {
    ASSERT_NEAR(ga[k] - gb[k], (a.upstream - b.upstream) * unit[k], 1e-12);
  }
}

TEST(Loss, BatchGradientIsMeanOfTupleGradients) {
  const auto c = model();
  Rng rng(6);
  const auto shape = NetworkShape::for_model(c);
  const auto policy = init_uniform(shape, rng);
  const auto target = init_uniform(shape, rng);
  std::vector<TransitionTuple> batch;
  for (int i = 0; i < 25; ++i) batch.push_back(random_tuple(c, rng));
  double mean_loss = 0.0;
  const auto g = batch_loss_gradient(policy, target, batch, initial_state(c), c, &mean_loss);
  std::vector<double> want(g.size(), 0.0);
  double want_loss = 0.0;
  for (const auto& t : batch) {
    const auto r = loss(policy, target, t, initial_state(c), c);
    want_loss += r.loss / 25;
    const auto gt = backward(policy, features(t.state, c), t.action, r.upstream);
    for (std::size_t k = 0; k < g.size(); ++k) want[k] += gt[k] / 25;
  }
  EXPECT_NEAR(mean_loss, want_loss, 1e-12);
  for (std::size_t k = 0; k < g.size(); ++k) ASSERT_NEAR(g[k], want[k], 1e-12);
}

TEST(RingBuffer, FifoEviction) {
  RingBuffer<char> b(3);
  for (char ch : {'a', 'b', 'c', 'd'}) b.push(ch);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0], 'b');
  EXPECT_EQ(b[1], 'c');
  EXPECT_EQ(b[2], 'd');
  EXPECT_THROW(RingBuffer<int>(0), ConfigError);
}

TEST(RingBuffer, FullSampleIsPermutation) {
  RingBuffer<int> b(10);
  for (int i = 0; i < 14; ++i) b.push(i);
  Rng rng(1);
  auto s = b.sample(10, rng);
  std::sort(s.begin(), s.end());
  EXPECT_EQ(s, (std::vector<int>{4, 5, 6, 7, 8, 9, 10, 11, 12, 13}));
  EXPECT_THROW(b.sample(11, rng), std::invalid_argument);
}

TEST(RingBuffer, SamplingUniform) {
  RingBuffer<int> b(5);
  for (int i = 0; i < 5; ++i) b.push(i);
  Rng rng(2);
  std::vector<int> hits(5, 0);
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const auto s = b.sample(2, rng);
    ASSERT_NE(s[0], s[1]);
    ++hits[s[0]];
    ++hits[s[1]];
  }
  // each item is in a 2-of-5 sample with probability 0.4
  const double sigma = std::sqrt(n * 0.4 * 0.6);
  for (int h : hits) EXPECT_NEAR(h, 0.4 * n, 3.5 * sigma);
}

TEST(Train, WarmupSyncAndTrace) {
  const auto t = small_trainer();
  const auto trace = train(model(), t);
  EXPECT_EQ(trace.episode_avg_cost.size(), 4u);
  EXPECT_EQ(trace.gradient_steps, 1000 - 32 + 1);
  EXPECT_EQ(trace.target_syncs, 10);
  // the last step is a sync step, so the target equals the final policy
  EXPECT_EQ(trace.target, trace.policy);
  for (double v : trace.episode_avg_cost) EXPECT_TRUE(std::isfinite(v));
}

TEST(Train, Deterministic) {
  const auto t = small_trainer();
  const auto a = train(model(), t);
  const auto b = train(model(), t);
  EXPECT_EQ(a.episode_avg_cost, b.episode_avg_cost);
  EXPECT_EQ(a.policy, b.policy);
  auto other = t;
  other.seed = 4;
  EXPECT_NE(train(model(), other).policy, a.policy);
}

TEST(Train, CallbackSeesEveryEpisode) {
  std::vector<int> seen;
  train(model(), small_trainer(), [&](int e, double) { seen.push_back(e); });
  EXPECT_EQ(seen, (std::vector<int>{1, 2, 3, 4}));
}

TEST(Train, PureExplorationMatchesRandomPolicy) {
  auto t = small_trainer();
  t.epsilon = {1.0, 1.0, 1.0};
  t.episodes = 1;
  t.episode_steps = 20000;
  t.target_update = 20000;
  const auto c = model(1.0);
  const double trained = train(c, t).episode_avg_cost[0];

  std::vector<double> costs;
  for (int s = 0; s < 30; ++s) {
    auto p = random_policy(1);
    Rng rng(derive_seed(11, s));
    costs.push_back(rollout(*p, c, 20000, rng, 0).avg_cost);
  }
  const auto stat = summarize(costs);
  EXPECT_NEAR(trained, stat.mean, 3.0 * stat.std);
}

TEST(Train, DivergenceIsReported) {
  auto t = small_trainer();
  t.learning_rate = 1e6;
  t.max_grad_norm = 0.0;
  EXPECT_THROW(train(model(4.0), t), NumericalError);
}

TEST(Train, ClippingBoundsEveryStep) {
  auto t = small_trainer();
  t.max_grad_norm = 1e-3;
  const auto c = model(4.0);
  const auto trace = train(c, t);
  Rng init_rng(derive_seed(t.seed, 0));
  const auto start = init_uniform(NetworkShape::for_model(c), init_rng);
  double sq = 0.0;
  for (std::size_t i = 0; i < start.values.size(); ++i) {
    const double d = trace.policy.values[i] - start.values[i];
    sq += d * d;
  }
  EXPECT_GT(trace.clipped_steps, 0);
  EXPECT_LE(std::sqrt(sq), trace.gradient_steps * t.learning_rate * t.max_grad_norm * (1 + 1e-9));

  t.max_grad_norm = 0.0;
  EXPECT_EQ(train(c, t).clipped_steps, 0);
  t.max_grad_norm = -1.0;
  EXPECT_THROW(train(c, t), ConfigError);
}

TEST(GreedyPolicy, MatchesTable) {
  const auto c = model();
  const auto trace = train(c, small_trainer());
  const auto table = greedy_table(trace.target, c);
  auto p = extract_greedy_policy(trace.target, c);
  EXPECT_EQ(tabulate(*p, c), table);
}
