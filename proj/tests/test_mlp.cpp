// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "helio/error.hpp"
#include "helio/eval.hpp"
#include "helio/mlp.hpp"
#include "oracles.hpp"

using namespace helio;

namespace {

MlpModel tiny(double w1, double b1, double w2, double b2) {
  auto m = init_mlp(MlpArchitecture{{1, 1, 1}}, 0);
  m.weights[0](0, 0) = w1;
  m.biases[0](0) = b1;
  m.weights[1](0, 0) = w2;
  m.biases[1](0) = b2;
  return m;
}

double relative_error(double a, double b) { return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-7}); }

}  // namespace

TEST_CASE("mlp: initialization") {
  const auto arch = MlpArchitecture::with_hidden(7);
  CHECK(arch.layer_sizes == std::vector<std::size_t>{7, 10, 5, 5, 1});
  const auto a = init_mlp(arch, 3), b = init_mlp(arch, 3), c = init_mlp(arch, 4);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    const double bound = std::sqrt(6.0 / static_cast<double>(arch.layer_sizes[l]));
    CHECK(a.weights[l].rows() == static_cast<Eigen::Index>(arch.layer_sizes[l + 1]));
    CHECK(a.weights[l].cols() == static_cast<Eigen::Index>(arch.layer_sizes[l]));
    CHECK(a.weights[l].cwiseAbs().maxCoeff() <= bound);
    CHECK(a.biases[l].isZero());
  }
  CHECK_THROWS_AS(init_mlp(MlpArchitecture{{3, 1}}, 0), Error);
  CHECK_THROWS_AS(init_mlp(MlpArchitecture{{3, 4, 2}}, 0), Error);
  CHECK_THROWS_AS(init_mlp(MlpArchitecture{{3, 0, 1}}, 0), Error);
}

TEST_CASE("mlp: forward hand traces") {
  CHECK(forward(tiny(0, 0, 0, 0), Matrix(1, 1, 5.0))[0] == 0.0);
  CHECK(forward(tiny(1, 0, 1, 0), Matrix(1, 1, 2.0))[0] == 2.0);
  CHECK(forward(tiny(1, -5, 3, 0.25), Matrix(1, 1, 2.0))[0] == 0.25);
  CHECK_THROWS_AS(forward(tiny(1, 0, 1, 0), Matrix(1, 2)), Error);
  CHECK(predict_mlp(tiny(1, 0, 1, 0), Matrix(0, 1)).empty());

  oracle::Gen g(60);
  const auto m = init_mlp(MlpArchitecture::with_hidden(4), 11);
  Matrix x(20, 4);
  for (std::size_t r = 0; r < 20; ++r)
    for (std::size_t c = 0; c < 4; ++c) x(r, c) = g.normal();
  const auto p = forward(m, x);
  for (std::size_t r = 0; r < 20; ++r) CHECK(p[r] == doctest::Approx(oracle::mlp_forward(m, x.row(r))).epsilon(1e-12));
}

TEST_CASE("mlp: gradients match central finite differences") {
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    oracle::Gen g(100 + seed);
    Matrix x(16, 7);
    std::vector<double> y(16);
    for (std::size_t r = 0; r < 16; ++r) {
      for (std::size_t c = 0; c < 7; ++c) x(r, c) = g.normal();
      y[r] = g.normal();
    }
    auto m = init_mlp(MlpArchitecture{{7, 4, 1}}, seed);
    for (auto& b : m.biases) b.setConstant(0.1);
    for (double alpha : {0.0, 0.01}) {
      const auto got = loss_and_gradient(m, x, y, alpha);
      const auto fd = oracle::finite_difference(m, [&](const MlpModel& mm) { return loss_and_gradient(mm, x, y, alpha).loss; });
      for (std::size_t l = 0; l < fd.weights.size(); ++l) {
        for (Eigen::Index i = 0; i < fd.weights[l].size(); ++i)
          CHECK(relative_error(got.grad.weights[l](i), fd.weights[l](i)) <= 1e-4);
        for (Eigen::Index i = 0; i < fd.biases[l].size(); ++i)
          CHECK(relative_error(got.grad.biases[l](i), fd.biases[l](i)) <= 1e-4);
      }
    }
  }
}

TEST_CASE("mlp: loss examples") {
  const auto m = tiny(1, 0, 2, 0);
  Matrix x(3, 1, std::vector<double>{1, 2, 3});
  const std::vector<double> y{2, 4, 6};
  const auto zero = loss_and_gradient(m, x, y, 0.0);
  CHECK(zero.loss == 0.0);
  for (const auto& w : zero.grad.weights) CHECK(w.isZero());
  const auto pen = loss_and_gradient(m, x, y, 0.3);
  CHECK(pen.loss == doctest::Approx(0.3 / 6.0 * (1 + 4)));
  for (std::size_t l = 0; l < 2; ++l) CHECK(pen.grad.weights[l].isApprox(m.weights[l] * (0.3 / 3.0)));
  CHECK_THROWS_AS(loss_and_gradient(m, x, std::vector<double>{1, 2}, 0.0), Error);
}

TEST_CASE("mlp: training contracts") {
  oracle::Gen g(61);
  Matrix x(100, 1);
  std::vector<double> y(100);
  for (std::size_t r = 0; r < 100; ++r) {
    x(r, 0) = g.normal();
    y[r] = 3 * x(r, 0);
  }
  MlpTrainConfig cfg;
  cfg.max_iter = 500;
  const auto arch = MlpArchitecture::with_hidden(1);
  const auto m = train_mlp(x, y, arch, cfg);
  CHECK(r2(predict_mlp(m, x), y) >= 0.999);
  CHECK(train_mlp(x, y, arch, cfg) == m);

  MlpTrainConfig once = cfg;
  once.max_iter = 1;
  CHECK(train_mlp(x, y, arch, once).loss_history.size() == 1);

  MlpTrainConfig wild = cfg;
  wild.learning_rate = 1e3;
  wild.max_iter = 50;
  try {
    const auto w = train_mlp(x, y, arch, wild);
    for (double v : predict_mlp(w, x)) CHECK(std::isfinite(v));
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Diverged);
  }

  MlpTrainConfig bad = cfg;
  bad.learning_rate = 0;
  CHECK_THROWS_AS(train_mlp(x, y, arch, bad), Error);
  bad = cfg;
  bad.max_iter = 0;
  CHECK_THROWS_AS(train_mlp(x, y, arch, bad), Error);
}
