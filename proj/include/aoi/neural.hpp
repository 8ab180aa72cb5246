#pragma once

// Fully connected state-action value network: ReLU hidden layers, linear
// output with one value per action.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "aoi/model.hpp"
#include "aoi/rng.hpp"

namespace aoi {

struct NetworkShape {
  int input_dim = 0;
  std::vector<int> hidden{64, 32, 16};
  int output_dim = 0;

  /// input F (Delta + 2), output F + 1.
  static NetworkShape for_model(const ModelConfig& config);

  int num_layers() const { return static_cast<int>(hidden.size()) + 1; }
  int layer_inputs(int layer) const { return layer == 0 ? input_dim : hidden[layer - 1]; }
  int layer_outputs(int layer) const {
    return layer == num_layers() - 1 ? output_dim : hidden[layer];
  }
  /// Sum over layers of (in + 1) * out.
  std::size_t parameter_count() const;
  /// Offset of layer l's weight block; its bias follows the weights.
  std::size_t layer_offset(int layer) const;

  friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

/// Flattened parameters. Per layer: the out x in weight matrix in
/// column-major order (W(i, j) at offset + j * out + i), then the out biases.
struct Parameters {
  NetworkShape shape;
  std::vector<double> values;

  friend bool operator==(const Parameters&, const Parameters&) = default;
};

Parameters zero_parameters(const NetworkShape& shape);

/// Weights uniform on (-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
Parameters init_uniform(const NetworkShape& shape, Rng& rng);

/// Per content (A / A-hat, Q^0 / N_f, ..., Q^{Delta-1} / N_f, G / N_f).
std::vector<double> features(const SystemState& s, const ModelConfig& config);
void features_into(const SystemState& s, const ModelConfig& config, std::span<double> out);

std::vector<double> forward(const Parameters& params, std::span<const double> x);

/// upstream * d output[action] / d params, in the Parameters layout.
std::vector<double> backward(const Parameters& params, std::span<const double> x, int action,
                             double upstream);

/// params -= step * gradient
void sgd_apply(Parameters& params, std::span<const double> gradient, double step);

inline Parameters copy_parameters(const Parameters& params) { return params; }

/// Index of the smallest entry; the first one on ties.
int argmin_action(std::span<const double> values);

/// Column-batched forward/backward used by training. Columns of the input
/// matrix are samples.
class BatchNetwork {
 public:
  /// Output matrix (output_dim x K); keeps activations for gradient().
  const Eigen::MatrixXd& forward(const Parameters& params, const Eigen::MatrixXd& inputs);

  /// Adds sum_k upstream[k] * d output(actions[k], k) / d params to
  /// `gradient`, for the batch of the last forward() call.
  void accumulate_gradient(const Parameters& params, std::span<const int> actions,
                           std::span<const double> upstream, std::span<double> gradient);

 private:
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
  std::vector<Eigen::MatrixXd> pre_;   // z per layer
  std::vector<Eigen::MatrixXd> post_;  // layer inputs: post_[0] = X, post_[l] = relu(z_{l-1})
  Eigen::MatrixXd delta_;
  Eigen::MatrixXd scratch_;
  Eigen::MatrixXd grad_w_;
  Eigen::VectorXd grad_b_;
};

/// Binary checkpoint, version 1: "AOINNET1" | u32 version | model block |
/// u32 layer count | i32 dims (input, hidden..., output) | u64 count |
/// f64 policy values | f64 target values.
inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

struct Checkpoint {
  ModelConfig config;
  Parameters policy;
  Parameters target;
};

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
void save_checkpoint(const Checkpoint& checkpoint, std::ostream& out);
Checkpoint load_checkpoint(const std::filesystem::path& path);
Checkpoint load_checkpoint(std::istream& in);

}  // namespace aoi
