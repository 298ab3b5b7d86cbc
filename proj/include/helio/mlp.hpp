// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "helio/matrix.hpp"

namespace helio {

// Layer widths from input to output; hidden layers use ReLU, the output is linear.
struct MlpArchitecture {
  std::vector<std::size_t> layer_sizes;

  void validate() const;  // BadArchitecture
  static MlpArchitecture with_hidden(std::size_t inputs, std::vector<std::size_t> hidden = {10, 5, 5});
  friend bool operator==(const MlpArchitecture&, const MlpArchitecture&) = default;
};

// Adam with the tuned MLP table's settings as defaults.
struct MlpTrainConfig {
  double learning_rate = 1e-3;
  double alpha_l2 = 1e-4;
  std::size_t max_iter = 5000;
  std::optional<std::size_t> batch_size;  // auto = min(200, n)
  bool shuffle = true;
  std::uint64_t seed = 42;
  double tol = 1e-6;
  std::size_t patience = 10;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
  friend bool operator==(const MlpTrainConfig&, const MlpTrainConfig&) = default;
};

struct MlpModel {
  MlpArchitecture arch;
  std::vector<Eigen::MatrixXd> weights;  // layer l: (out x in)
  std::vector<Eigen::VectorXd> biases;
  std::vector<double> loss_history;
  MlpTrainConfig config;
  // Output = network * target_scale + target_mean; identity for a fresh model.
  double target_mean = 0.0;
  double target_scale = 1.0;

  std::size_t input_size() const noexcept { return arch.layer_sizes.front(); }
};

bool operator==(const MlpModel& a, const MlpModel& b);

// He-uniform weights in +-sqrt(6 / fan_in) from the (seed, mlp_init, layer) stream; zero biases.
MlpModel init_mlp(const MlpArchitecture& arch, std::uint64_t seed);

std::vector<double> forward(const MlpModel& model, const Matrix& x);

struct MlpGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

struct LossAndGradient {
  double loss = 0.0;
  MlpGradients grad;
};

// loss = sum((f(x) - y)^2) / (2n) + alpha / (2n) * sum(W^2), gradients by backpropagation.
LossAndGradient loss_and_gradient(const MlpModel& model, const Matrix& x, std::span<const double> y, double alpha_l2);

// Mini-batch Adam on the z-scored target. Stops after max_iter epochs or when the
// epoch loss fails to improve on the best by tol for `patience` epochs in a row.
// Throws Diverged on a non-finite loss.
MlpModel train_mlp(const Matrix& x, std::span<const double> y, const MlpArchitecture& arch, const MlpTrainConfig& cfg);

std::vector<double> predict_mlp(const MlpModel& model, const Matrix& x);

}  // namespace helio
