#include "aoi/neural.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "aoi/binary_io.hpp"
#include "aoi/errors.hpp"
#include "aoi/policy_io.hpp"

namespace aoi {

NetworkShape NetworkShape::for_model(const ModelConfig& config) {
  NetworkShape shape;
  shape.input_dim = config.num_contents * (config.window + 2);
  shape.output_dim = config.num_actions();
  return shape;
}

std::size_t NetworkShape::parameter_count() const {
  std::size_t total = 0;
  for (int l = 0; l < num_layers(); ++l) {
    total += static_cast<std::size_t>(layer_inputs(l) + 1) * layer_outputs(l);
  }
  return total;
}

std::size_t NetworkShape::layer_offset(int layer) const {
  std::size_t offset = 0;
  for (int l = 0; l < layer; ++l) {
    offset += static_cast<std::size_t>(layer_inputs(l) + 1) * layer_outputs(l);
  }
  return offset;
}

Parameters zero_parameters(const NetworkShape& shape) {
  if (shape.input_dim < 1 || shape.output_dim < 1) throw ConfigError("network dims must be positive");
  for (int h : shape.hidden) {
    if (h < 1) throw ConfigError("network dims must be positive");
  }
  return Parameters{shape, std::vector<double>(shape.parameter_count(), 0.0)};
}

Parameters init_uniform(const NetworkShape& shape, Rng& rng) {
  Parameters p = zero_parameters(shape);
  for (int l = 0; l < shape.num_layers(); ++l) {
    const int in = shape.layer_inputs(l);
    const int out = shape.layer_outputs(l);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    double* w = p.values.data() + shape.layer_offset(l);
    for (int k = 0; k < in * out; ++k) {
      // (2u - 1) with u in [0, 1) can hit -1 exactly; redraw that case.
      double x = 2.0 * rng.uniform() - 1.0;
      while (x == -1.0) x = 2.0 * rng.uniform() - 1.0;
      w[k] = bound * x;
    }
  }
  return p;
}

void features_into(const SystemState& s, const ModelConfig& config, std::span<double> out) {
  const std::size_t width = static_cast<std::size_t>(config.window) + 2;
  if (out.size() != width * config.num_contents) throw std::invalid_argument("feature buffer size");
  std::size_t k = 0;
  for (int f = 0; f < config.num_contents; ++f) {
    const auto& c = s.contents[f];
    const double n = config.users[f];
    out[k++] = static_cast<double>(c.aoi) / config.aoi_cap;
    for (int q : c.queues) out[k++] = q / n;
    out[k++] = c.arrivals / n;
  }
}

std::vector<double> features(const SystemState& s, const ModelConfig& config) {
  std::vector<double> x(static_cast<std::size_t>(config.num_contents) * (config.window + 2));
  features_into(s, config, x);
  return x;
}

namespace {

// Plain loops, one sample; activations[l] is the input of layer l.
std::vector<std::vector<double>> forward_trace(const Parameters& params, std::span<const double> x,
                                               std::vector<std::vector<double>>* pre) {
  const auto& shape = params.shape;
  if (x.size() != static_cast<std::size_t>(shape.input_dim)) {
    throw std::invalid_argument("input has " + std::to_string(x.size()) + " features, network expects " +
                                std::to_string(shape.input_dim));
  }
  std::vector<std::vector<double>> act;
  act.emplace_back(x.begin(), x.end());
  for (int l = 0; l < shape.num_layers(); ++l) {
    const int in = shape.layer_inputs(l);
    const int out = shape.layer_outputs(l);
    const double* w = params.values.data() + shape.layer_offset(l);
    const double* b = w + static_cast<std::size_t>(in) * out;
    std::vector<double> z(b, b + out);
    for (int j = 0; j < in; ++j) {
      const double a = act.back()[j];
      for (int i = 0; i < out; ++i) z[i] += w[j * out + i] * a;
    }
    if (pre) pre->push_back(z);
    if (l + 1 < shape.num_layers()) {
      for (auto& v : z) v = v > 0.0 ? v : 0.0;
    }
    act.push_back(std::move(z));
  }
  return act;
}

}  // namespace

std::vector<double> forward(const Parameters& params, std::span<const double> x) {
  return forward_trace(params, x, nullptr).back();
}

std::vector<double> backward(const Parameters& params, std::span<const double> x, int action,
                             double upstream) {
  const auto& shape = params.shape;
  if (action < 0 || action >= shape.output_dim) {
    throw std::out_of_range("action index " + std::to_string(action) + " outside the output layer");
  }
  std::vector<std::vector<double>> pre;
  const auto act = forward_trace(params, x, &pre);
  std::vector<double> grad(params.values.size(), 0.0);

  std::vector<double> delta(shape.output_dim, 0.0);
  delta[action] = upstream;
  for (int l = shape.num_layers() - 1; l >= 0; --l) {
    const int in = shape.layer_inputs(l);
    const int out = shape.layer_outputs(l);
    const double* w = params.values.data() + shape.layer_offset(l);
    double* gw = grad.data() + shape.layer_offset(l);
    double* gb = gw + static_cast<std::size_t>(in) * out;
    for (int j = 0; j < in; ++j) {
      for (int i = 0; i < out; ++i) gw[j * out + i] = delta[i] * act[l][j];
    }
    for (int i = 0; i < out; ++i) gb[i] = delta[i];
    if (l == 0) break;
    std::vector<double> below(in, 0.0);
    for (int j = 0; j < in; ++j) {
      if (pre[l - 1][j] <= 0.0) continue;  // ReLU gate
      double acc = 0.0;
      for (int i = 0; i < out; ++i) acc += w[j * out + i] * delta[i];
      below[j] = acc;
    }
    delta = std::move(below);
  }
  return grad;
}

void sgd_apply(Parameters& params, std::span<const double> gradient, double step) {
  if (gradient.size() != params.values.size()) throw std::invalid_argument("gradient size mismatch");
  for (std::size_t k = 0; k < gradient.size(); ++k) params.values[k] -= step * gradient[k];
}

int argmin_action(std::span<const double> values) {
  int best = 0;
  for (int u = 1; u < static_cast<int>(values.size()); ++u) {
    if (values[u] < values[best]) best = u;
  }
  return best;
}

// Weights are copied into Eigen-owned (aligned) storage: Eigen's product
// kernels round differently depending on the alignment of mapped buffers,
// which would make results depend on where the allocator put the vector.
const Eigen::MatrixXd& BatchNetwork::forward(const Parameters& params, const Eigen::MatrixXd& inputs) {
  const auto& shape = params.shape;
  const int layers = shape.num_layers();
  weights_.resize(layers);
  biases_.resize(layers);
  pre_.resize(layers);
  post_.resize(layers);
  post_[0] = inputs;
  for (int l = 0; l < layers; ++l) {
    const int in = shape.layer_inputs(l);
    const int out = shape.layer_outputs(l);
    const double* w = params.values.data() + shape.layer_offset(l);
    weights_[l] = Eigen::Map<const Eigen::MatrixXd>(w, out, in);
    biases_[l] = Eigen::Map<const Eigen::VectorXd>(w + static_cast<std::size_t>(in) * out, out);
    pre_[l].noalias() = weights_[l] * post_[l];
    pre_[l].colwise() += biases_[l];
    if (l + 1 < layers) post_[l + 1] = pre_[l].cwiseMax(0.0);
  }
  return pre_.back();
}

void BatchNetwork::accumulate_gradient(const Parameters& params, std::span<const int> actions,
                                       std::span<const double> upstream, std::span<double> gradient) {
  const auto& shape = params.shape;
  const int layers = shape.num_layers();
  const auto batch = static_cast<Eigen::Index>(actions.size());
  if (pre_.empty() || pre_.back().cols() != batch || upstream.size() != actions.size() ||
      !(weights_.size() == static_cast<std::size_t>(layers))) {
    throw std::invalid_argument("accumulate_gradient: batch does not match the last forward pass");
  }
  delta_.setZero(shape.output_dim, batch);
  for (Eigen::Index k = 0; k < batch; ++k) delta_(actions[k], k) = upstream[k];

  for (int l = layers - 1; l >= 0; --l) {
    const int in = shape.layer_inputs(l);
    const int out = shape.layer_outputs(l);
    const std::size_t offset = shape.layer_offset(l);
    grad_w_.noalias() = delta_ * post_[l].transpose();
    grad_b_ = delta_.rowwise().sum();
    Eigen::Map<Eigen::MatrixXd>(gradient.data() + offset, out, in) += grad_w_;
    Eigen::Map<Eigen::VectorXd>(gradient.data() + offset + static_cast<std::size_t>(in) * out, out) += grad_b_;
    if (l == 0) break;
    scratch_.noalias() = weights_[l].transpose() * delta_;
    delta_ = (pre_[l - 1].array() > 0.0).select(scratch_, 0.0);
  }
}

void save_checkpoint(const Checkpoint& checkpoint, std::ostream& out) {
  const auto& shape = checkpoint.policy.shape;
  if (!(checkpoint.target.shape == shape)) throw std::invalid_argument("policy/target shape mismatch");
  out.write("AOINNET1", 8);
  binary::put<std::uint32_t>(out, kCheckpointFormatVersion);
  write_model_block(out, checkpoint.config);
  binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(shape.num_layers()));
  binary::put<std::int32_t>(out, shape.input_dim);
  for (int h : shape.hidden) binary::put<std::int32_t>(out, h);
  binary::put<std::int32_t>(out, shape.output_dim);
  binary::put<std::uint64_t>(out, checkpoint.policy.values.size());
  for (double v : checkpoint.policy.values) binary::put<double>(out, v);
  for (double v : checkpoint.target.values) binary::put<double>(out, v);
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  save_checkpoint(checkpoint, out);
  if (!out) throw ConfigError("write failed for " + path.string());
}

Checkpoint load_checkpoint(std::istream& in) {
  binary::expect_magic(in, "AOINNET1");
  const auto version = binary::get<std::uint32_t>(in);
  if (version != kCheckpointFormatVersion) {
    throw ConfigError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint cp;
  cp.config = read_model_block(in);
  const auto layers = binary::get<std::uint32_t>(in);
  if (layers < 1 || layers > 64) throw ConfigError("corrupt checkpoint header");
  NetworkShape shape;
  shape.input_dim = binary::get<std::int32_t>(in);
  shape.hidden.resize(layers - 1);
  for (auto& h : shape.hidden) h = binary::get<std::int32_t>(in);
  shape.output_dim = binary::get<std::int32_t>(in);
  const auto count = binary::get<std::uint64_t>(in);
  if (count != zero_parameters(shape).values.size()) throw ConfigError("checkpoint size mismatch");
  if (shape.input_dim != NetworkShape::for_model(cp.config).input_dim ||
      shape.output_dim != cp.config.num_actions()) {
    throw ConfigError("checkpoint network does not fit its model");
  }
  cp.policy = zero_parameters(shape);
  cp.target = zero_parameters(shape);
  for (auto& v : cp.policy.values) v = binary::get<double>(in);
  for (auto& v : cp.target.values) v = binary::get<double>(in);
  return cp;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return load_checkpoint(in);
}

}  // namespace aoi
