// SPDX-License-Identifier: Apache-2.0
#include "helio/mlp.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "helio/error.hpp"
#include "helio/rng.hpp"

namespace helio {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void MlpArchitecture::validate() const {
  if (layer_sizes.size() < 3) fail(Errc::BadArchitecture, "need an input, at least one hidden layer and an output");
  for (auto s : layer_sizes)
    if (s == 0) fail(Errc::BadArchitecture, "layer sizes must be positive");
  if (layer_sizes.back() != 1) fail(Errc::BadArchitecture, "output layer must have exactly one unit");
}

MlpArchitecture MlpArchitecture::with_hidden(std::size_t inputs, std::vector<std::size_t> hidden) {
  MlpArchitecture a;
  a.layer_sizes.push_back(inputs);
  a.layer_sizes.insert(a.layer_sizes.end(), hidden.begin(), hidden.end());
  a.layer_sizes.push_back(1);
  return a;
}

void MlpTrainConfig::validate() const {
  if (!(learning_rate > 0.0)) fail(Errc::InvalidConfig, "learning_rate must be > 0");
  if (max_iter < 1) fail(Errc::InvalidConfig, "max_iter must be >= 1");
  if (alpha_l2 < 0.0) fail(Errc::InvalidConfig, "alpha_l2 must be >= 0");
  if (batch_size && *batch_size < 1) fail(Errc::InvalidConfig, "batch_size must be >= 1");
  if (tol < 0.0) fail(Errc::InvalidConfig, "tol must be >= 0");
  if (patience < 1) fail(Errc::InvalidConfig, "patience must be >= 1");
}

bool operator==(const MlpModel& a, const MlpModel& b) {
  if (!(a.arch == b.arch) || !(a.config == b.config) || a.loss_history != b.loss_history ||
      a.target_mean != b.target_mean || a.target_scale != b.target_scale || a.weights.size() != b.weights.size())
    return false;
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    if (a.weights[l].rows() != b.weights[l].rows() || a.weights[l].cols() != b.weights[l].cols()) return false;
    if (a.weights[l] != b.weights[l] || a.biases[l] != b.biases[l]) return false;
  }
  return true;
}

MlpModel init_mlp(const MlpArchitecture& arch, std::uint64_t seed) {
  arch.validate();
  MlpModel m;
  m.arch = arch;
  const std::size_t layers = arch.layer_sizes.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const auto fan_in = static_cast<Eigen::Index>(arch.layer_sizes[l]);
    const auto fan_out = static_cast<Eigen::Index>(arch.layer_sizes[l + 1]);
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    CounterRng rng(seed, StreamTag::mlp_init, l);
    MatrixXd w(fan_out, fan_in);
    for (Eigen::Index r = 0; r < fan_out; ++r)
      for (Eigen::Index c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-bound, bound);
    m.weights.push_back(std::move(w));
    m.biases.push_back(VectorXd::Zero(fan_out));
  }
  return m;
}

namespace {

// Samples as columns: (features x n).
MatrixXd to_columns(const Matrix& x) {
  MatrixXd a(static_cast<Eigen::Index>(x.cols()), static_cast<Eigen::Index>(x.rows()));
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) a(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = x(r, c);
  return a;
}

void check_width(const MlpModel& m, std::size_t cols) {
  if (cols != m.input_size())
    fail(Errc::DimensionMismatch, "network expects " + std::to_string(m.input_size()) + " inputs, got " + std::to_string(cols));
}

// Activations per layer; acts[0] is the input, acts.back() the raw network output.
std::vector<MatrixXd> forward_pass(const MlpModel& m, MatrixXd input) {
  std::vector<MatrixXd> acts;
  acts.reserve(m.weights.size() + 1);
  acts.push_back(std::move(input));
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    MatrixXd z = m.weights[l] * acts.back();
    z.colwise() += m.biases[l];
    if (l + 1 < m.weights.size()) z = z.cwiseMax(0.0);
    acts.push_back(std::move(z));
  }
  return acts;
}

double penalty(const MlpModel& m) {
  double s = 0.0;
  for (const auto& w : m.weights) s += w.squaredNorm();
  return s;
}

// Loss and gradients on column-major samples, with y already aligned to columns.
LossAndGradient batch_loss_and_gradient(const MlpModel& m, MatrixXd input, const VectorXd& y, double alpha) {
  const auto n = static_cast<double>(input.cols());
  const auto acts = forward_pass(m, std::move(input));
  const Eigen::RowVectorXd pred = acts.back().row(0).array() * m.target_scale + m.target_mean;
  const Eigen::RowVectorXd err = pred - y.transpose();

  LossAndGradient out;
  out.loss = err.squaredNorm() / (2.0 * n) + alpha / (2.0 * n) * penalty(m);

  const std::size_t layers = m.weights.size();
  out.grad.weights.resize(layers);
  out.grad.biases.resize(layers);
  MatrixXd delta = (err * (m.target_scale / n));
  for (std::size_t k = layers; k-- > 0;) {
    out.grad.weights[k] = delta * acts[k].transpose() + (alpha / n) * m.weights[k];
    out.grad.biases[k] = delta.rowwise().sum();
    if (k > 0) {
      MatrixXd back = m.weights[k].transpose() * delta;
      delta = (acts[k].array() > 0.0).select(back, 0.0);
    }
  }
  return out;
}

}  // namespace

std::vector<double> forward(const MlpModel& model, const Matrix& x) {
  check_width(model, x.cols());
  if (x.rows() == 0) return {};
  const auto acts = forward_pass(model, to_columns(x));
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    out[i] = acts.back()(0, static_cast<Eigen::Index>(i)) * model.target_scale + model.target_mean;
  return out;
}

std::vector<double> predict_mlp(const MlpModel& model, const Matrix& x) { return forward(model, x); }

LossAndGradient loss_and_gradient(const MlpModel& model, const Matrix& x, std::span<const double> y, double alpha_l2) {
  check_width(model, x.cols());
  if (y.size() != x.rows()) fail(Errc::DimensionMismatch, "loss_and_gradient: row and target counts differ");
  if (x.rows() == 0) fail(Errc::Empty, "loss_and_gradient: no samples");
  VectorXd yv = Eigen::Map<const VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  return batch_loss_and_gradient(model, to_columns(x), yv, alpha_l2);
}

MlpModel train_mlp(const Matrix& x, std::span<const double> y, const MlpArchitecture& arch, const MlpTrainConfig& cfg) {
  cfg.validate();
  MlpModel model = init_mlp(arch, cfg.seed);
  model.config = cfg;
  check_width(model, x.cols());
  const std::size_t n = x.rows();
  if (n == 0 || y.size() != n) fail(Errc::DimensionMismatch, "train_mlp: row and target counts differ or are zero");

  const double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : y) ss += (v - y_mean) * (v - y_mean);
  double y_scale = std::sqrt(ss / static_cast<double>(n));
  if (!(y_scale > 0.0)) y_scale = 1.0;
  VectorXd z(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) z(static_cast<Eigen::Index>(i)) = (y[i] - y_mean) / y_scale;

  const MatrixXd all = to_columns(x);
  const std::size_t batch = std::min(cfg.batch_size.value_or(std::min<std::size_t>(200, n)), n);
  const std::size_t layers = model.weights.size();

  std::vector<MatrixXd> mw(layers), vw(layers);
  std::vector<VectorXd> mb(layers), vb(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    mw[l] = MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols());
    vw[l] = mw[l];
    mb[l] = VectorXd::Zero(model.biases[l].size());
    vb[l] = mb[l];
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  std::uint64_t step = 0;
  const auto d = static_cast<Eigen::Index>(x.cols());
  MatrixXd xb;
  VectorXd yb;

  for (std::size_t epoch = 0; epoch < cfg.max_iter; ++epoch) {
    if (cfg.shuffle) {
      CounterRng rng(cfg.seed, StreamTag::mlp_shuffle, epoch);
      order = permutation(n, rng);
    }
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(start + batch, n);
      const auto b = static_cast<Eigen::Index>(end - start);
      xb.resize(d, b);
      yb.resize(b);
      for (Eigen::Index j = 0; j < b; ++j) {
        const auto src = static_cast<Eigen::Index>(order[start + static_cast<std::size_t>(j)]);
        xb.col(j) = all.col(src);
        yb(j) = z(src);
      }
      auto lg = batch_loss_and_gradient(model, xb, yb, cfg.alpha_l2);
      if (!std::isfinite(lg.loss))
        fail(Errc::Diverged, "training loss became non-finite in epoch " + std::to_string(epoch + 1));
      epoch_loss += lg.loss * static_cast<double>(b);

      ++step;
      const double t = static_cast<double>(step);
      const double lr_t = cfg.learning_rate * std::sqrt(1.0 - std::pow(cfg.beta2, t)) / (1.0 - std::pow(cfg.beta1, t));
      for (std::size_t l = 0; l < layers; ++l) {
        mw[l] = cfg.beta1 * mw[l] + (1.0 - cfg.beta1) * lg.grad.weights[l];
        vw[l] = cfg.beta2 * vw[l] + (1.0 - cfg.beta2) * lg.grad.weights[l].cwiseProduct(lg.grad.weights[l]);
        mb[l] = cfg.beta1 * mb[l] + (1.0 - cfg.beta1) * lg.grad.biases[l];
        vb[l] = cfg.beta2 * vb[l] + (1.0 - cfg.beta2) * lg.grad.biases[l].cwiseProduct(lg.grad.biases[l]);
        model.weights[l].array() -= lr_t * mw[l].array() / (vw[l].array().sqrt() + cfg.epsilon);
        model.biases[l].array() -= lr_t * mb[l].array() / (vb[l].array().sqrt() + cfg.epsilon);
      }
    }
    epoch_loss /= static_cast<double>(n);
    if (!std::isfinite(epoch_loss))
      fail(Errc::Diverged, "training loss became non-finite in epoch " + std::to_string(epoch + 1));
    model.loss_history.push_back(epoch_loss);

    if (epoch_loss > best - cfg.tol) {
      ++stale;
    } else {
      stale = 0;
    }
    best = std::min(best, epoch_loss);
    if (stale >= cfg.patience) break;
  }

  for (std::size_t l = 0; l < layers; ++l)
    if (!model.weights[l].allFinite() || !model.biases[l].allFinite())
      fail(Errc::Diverged, "network parameters became non-finite");
  model.target_mean = y_mean;
  model.target_scale = y_scale;
  return model;
}

}  // namespace helio
