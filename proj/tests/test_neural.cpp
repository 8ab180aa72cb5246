#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "aoi/errors.hpp"
#include "aoi/neural.hpp"

using namespace aoi;

namespace {

NetworkShape shape3() {
  NetworkShape s;
  s.input_dim = 6;
  s.output_dim = 2;
  return s;
}

std::vector<double> random_input(int n, Rng& rng) {
  std::vector<double> x(n);
  for (auto& v : x) v = rng.uniform();
  return x;
}

// Independent evaluation with dense Eigen matrices built entry by entry.
Eigen::VectorXd reference_forward(const Parameters& p, const std::vector<double>& x) {
  Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  std::size_t off = 0;
  const auto& s = p.shape;
  for (int l = 0; l < s.num_layers(); ++l) {
    const int in = s.layer_inputs(l), out = s.layer_outputs(l);
    Eigen::MatrixXd w(out, in);
    for (int j = 0; j < in; ++j)
      for (int i = 0; i < out; ++i) w(i, j) = p.values[off + j * out + i];
    off += static_cast<std::size_t>(in) * out;
    Eigen::VectorXd b(out);
    for (int i = 0; i < out; ++i) b[i] = p.values[off + i];
    off += out;
    a = w * a + b;
    if (l + 1 < s.num_layers()) a = a.cwiseMax(0.0);
  }
  return a;
}

}  // namespace

TEST(Shape, ForModel) {
  ModelConfig c;
  const auto s = NetworkShape::for_model(c);
  EXPECT_EQ(s.input_dim, 6);
  EXPECT_EQ(s.output_dim, 2);
  EXPECT_EQ(s.parameter_count(), 7u * 64 + 65u * 32 + 33u * 16 + 17u * 2);
  EXPECT_EQ(zero_parameters(s).values.size(), s.parameter_count());
  EXPECT_EQ(s.layer_offset(1), 7u * 64);
}

TEST(Features, NormalizedLayout) {
  ModelConfig c;
  c.num_contents = 2;
  c.window = 2;
  c.aoi_cap = 10;
  c.users = {2, 4};
  c.arrival_rates = {0.5, 0.5};
  SystemState s{{{5, {1, 2}, 0}, {10, {4, 0}, 3}}};
  EXPECT_EQ(features(s, c), (std::vector<double>{0.5, 0.5, 1.0, 0.0, 1.0, 1.0, 0.0, 0.75}));
}

TEST(Init, RangeAndDeterminism) {
  const auto s = shape3();
  Rng a(5), b(5);
  const auto p = init_uniform(s, a);
  EXPECT_EQ(p, init_uniform(s, b));
  std::size_t off = 0;
  for (int l = 0; l < s.num_layers(); ++l) {
    const int in = s.layer_inputs(l), out = s.layer_outputs(l);
    const double r = 1.0 / std::sqrt(in);
    for (int k = 0; k < in * out; ++k) {
      ASSERT_GT(p.values[off + k], -r);
      ASSERT_LT(p.values[off + k], r);
    }
    off += static_cast<std::size_t>(in) * out;
    for (int k = 0; k < out; ++k) ASSERT_EQ(p.values[off + k], 0.0);
    off += out;
  }
}

TEST(Init, MeanNearZero) {
  NetworkShape s;
  s.input_dim = 1;
  s.hidden = {};
  s.output_dim = 100000;
  Rng rng(12);
  const auto p = init_uniform(s, rng);
  double sum = 0.0;
  for (int k = 0; k < 100000; ++k) sum += p.values[k];
  // U(-1, 1) has variance 1/3
  EXPECT_NEAR(sum / 100000, 0.0, 3.0 * std::sqrt(1.0 / 3.0 / 100000));
}

TEST(Forward, ZeroWeights) {
  const auto p = zero_parameters(shape3());
  EXPECT_EQ(forward(p, std::vector<double>(6, 0.7)), (std::vector<double>{0.0, 0.0}));
}

TEST(Forward, PositiveHomogeneityWithoutBiases) {
  Rng rng(8);
  const auto p = init_uniform(shape3(), rng);
  const auto x = random_input(6, rng);
  auto x3 = x;
  for (auto& v : x3) v *= 3.0;
  const auto y = forward(p, x), y3 = forward(p, x3);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(y3[i], 3.0 * y[i], 1e-12);
}

TEST(Forward, MatchesDenseReference) {
  Rng rng(21);
  auto p = init_uniform(shape3(), rng);
  for (auto& v : p.values) v += 0.1 * (rng.uniform() - 0.5);
  for (int k = 0; k < 10; ++k) {
    const auto x = random_input(6, rng);
    const auto y = forward(p, x);
    const auto ref = reference_forward(p, x);
    for (int i = 0; i < 2; ++i) EXPECT_NEAR(y[i], ref[i], 1e-10);
  }
}

TEST(Backward, CentralDifferences) {
  Rng rng(99);
  int checked = 0;
  for (int probe = 0; probe < 100; ++probe) {
    auto p = init_uniform(shape3(), rng);
    for (auto& v : p.values) v += 0.2 * (rng.uniform() - 0.5);
    const auto x = random_input(6, rng);
    const int action = static_cast<int>(rng.uniform_index(2));
    const auto g = backward(p, x, action, 1.0);
    // one random coordinate per layer block, plus the output bias
    for (int l = 0; l < p.shape.num_layers(); ++l) {
      const std::size_t lo = p.shape.layer_offset(l);
      const std::size_t hi = l + 1 < p.shape.num_layers() ? p.shape.layer_offset(l + 1) : p.values.size();
      const std::size_t k = lo + rng.uniform_index(hi - lo);
      auto plus = p, minus = p;
      plus.values[k] += 1e-5;
      minus.values[k] -= 1e-5;
      const double fd = (forward(plus, x)[action] - forward(minus, x)[action]) / 2e-5;
      const double scale = std::max({std::abs(fd), std::abs(g[k]), 1e-6});
      ASSERT_LT(std::abs(fd - g[k]) / scale, 1e-4) << "probe " << probe << " param " << k;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 400);
}

TEST(Backward, TrivialCases) {
  Rng rng(2);
  const auto p = init_uniform(shape3(), rng);
  const auto x = random_input(6, rng);
  for (double v : backward(p, x, 1, 0.0)) ASSERT_EQ(v, 0.0);
  const auto g = backward(p, x, 1, 2.5);
  const std::size_t out_bias = p.values.size() - 2;
  EXPECT_EQ(g[out_bias + 1], 2.5);
  EXPECT_EQ(g[out_bias], 0.0);
  EXPECT_THROW(backward(p, x, 2, 1.0), std::out_of_range);
  EXPECT_THROW(backward(p, x, -1, 1.0), std::out_of_range);
}

TEST(Sgd, QuadraticStep) {
  NetworkShape s;
  s.input_dim = 1;
  s.hidden = {};
  s.output_dim = 1;
  Parameters theta = zero_parameters(s);
  ASSERT_EQ(theta.values.size(), 2u);
  // theta is the bias; d/dtheta 1/2 (theta - 3)^2 at 0 = -3
  const std::vector<double> grad{0.0, theta.values[1] - 3.0};
  sgd_apply(theta, grad, 0.1);
  EXPECT_NEAR(theta.values[1], 0.3, 1e-15);
  EXPECT_EQ(theta.values[0], 0.0);
}

TEST(Argmin, FirstOnTies) {
  EXPECT_EQ(argmin_action(std::vector<double>{1.0, 1.0}), 0);
  EXPECT_EQ(argmin_action(std::vector<double>{2.0, 1.0, 1.0}), 1);
}

TEST(BatchNetwork, AgreesWithSingleSample) {
  Rng rng(31);
  auto p = init_uniform(shape3(), rng);
  const int k = 17;
  Eigen::MatrixXd x(6, k);
  std::vector<int> actions(k);
  std::vector<double> up(k);
  std::vector<double> want(p.values.size(), 0.0);
  for (int j = 0; j < k; ++j) {
    const auto xj = random_input(6, rng);
    for (int i = 0; i < 6; ++i) x(i, j) = xj[i];
    actions[j] = static_cast<int>(rng.uniform_index(2));
    up[j] = rng.uniform() - 0.5;
    const auto g = backward(p, xj, actions[j], up[j]);
    for (std::size_t q = 0; q < g.size(); ++q) want[q] += g[q];
  }
  BatchNetwork net;
  const Eigen::MatrixXd out = net.forward(p, x);
  for (int j = 0; j < k; ++j) {
    std::vector<double> xj(6);
    for (int i = 0; i < 6; ++i) xj[i] = x(i, j);
    const auto y = forward(p, xj);
    for (int i = 0; i < 2; ++i) EXPECT_NEAR(out(i, j), y[i], 1e-12);
  }
  std::vector<double> got(p.values.size(), 0.0);
  net.accumulate_gradient(p, actions, up, got);
  for (std::size_t q = 0; q < got.size(); ++q) ASSERT_NEAR(got[q], want[q], 1e-12);
}

TEST(Checkpoint, RoundTripAndValidation) {
  ModelConfig c;
  c.update_weight = 0.5;
  Rng rng(6);
  const auto shape = NetworkShape::for_model(c);
  Checkpoint cp{c, init_uniform(shape, rng), init_uniform(shape, rng)};
  std::stringstream buf;
  save_checkpoint(cp, buf);
  const auto back = load_checkpoint(buf);
  EXPECT_EQ(back.config, c);
  EXPECT_EQ(back.policy, cp.policy);
  EXPECT_EQ(back.target, cp.target);

  std::stringstream bad("AOINNET0xxxxxxxx");
  EXPECT_THROW(load_checkpoint(bad), ConfigError);
  const std::string bytes = buf.str();
  std::stringstream cut(bytes.substr(0, bytes.size() - 9));
  EXPECT_THROW(load_checkpoint(cut), ConfigError);
}
