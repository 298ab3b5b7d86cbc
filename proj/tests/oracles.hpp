// SPDX-License-Identifier: Apache-2.0
//
// Test-only reference implementations. They are written independently of the
// library code (different formulas, accumulation orders or algorithms) so the
// tests compare two computations rather than one against itself.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "helio/matrix.hpp"
#include "helio/mlp.hpp"
#include "helio/tree.hpp"

namespace oracle {

// Small deterministic generator for property tests (xorshift64*).
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : s_(seed * 2654435761ULL + 0x9E3779B97F4A7C15ULL) {}
  std::uint64_t next() {
    s_ ^= s_ >> 12;
    s_ ^= s_ << 25;
    s_ ^= s_ >> 27;
    return s_ * 2685821657736338717ULL;
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
  double normal() {
    const double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(6.283185307179586 * u2);
  }
  std::vector<double> vec(std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

 private:
  std::uint64_t s_;
};

// Metrics accumulated in long double.
inline double mae(const std::vector<double>& p, const std::vector<double>& a) {
  long double s = 0;
  for (std::size_t i = p.size(); i-- > 0;) s += std::fabs(static_cast<long double>(p[i]) - a[i]);
  return static_cast<double>(s / p.size());
}
inline double mse(const std::vector<double>& p, const std::vector<double>& a) {
  long double s = 0;
  for (std::size_t i = p.size(); i-- > 0;) {
    const long double e = static_cast<long double>(p[i]) - a[i];
    s += e * e;
  }
  return static_cast<double>(s / p.size());
}

// Pearson via the raw-moment covariance formula in long double.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const long double n = static_cast<long double>(x.size());
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    syy += static_cast<long double>(y[i]) * y[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double cov = sxy / n - (sx / n) * (sy / n);
  const long double vx = sxx / n - (sx / n) * (sx / n);
  const long double vy = syy / n - (sy / n) * (sy / n);
  return static_cast<double>(cov / std::sqrt(vx * vy));
}

struct BestSplit {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double sse_after = std::numeric_limits<double>::infinity();
};

// Exhaustive scan: every feature, every midpoint between distinct sorted
// values, SSE of both sides recomputed from scratch. Minimizing total SSE is
// the same as maximizing variance reduction. Ties resolved toward the lowest
// feature, then the lowest threshold, with a relative tolerance so floating
// point noise in the two SSE formulas cannot flip a genuine tie.
inline BestSplit exhaustive_split(const helio::Matrix& x, const std::vector<double>& y, std::size_t min_leaf = 1) {
  BestSplit best;
  const std::size_t n = x.rows();
  for (std::size_t f = 0; f < x.cols(); ++f) {
    auto col = x.column(f);
    auto vals = col;
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
      const double t = vals[k] + (vals[k + 1] - vals[k]) / 2.0;
      long double sl = 0, sr = 0;
      std::size_t nl = 0, nr = 0;
      for (std::size_t i = 0; i < n; ++i) (col[i] < t ? (sl += y[i], ++nl) : (sr += y[i], ++nr));
      if (nl < min_leaf || nr < min_leaf) continue;
      const long double ml = sl / nl, mr = sr / nr;
      long double sse = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const long double d = y[i] - (col[i] < t ? ml : mr);
        sse += d * d;
      }
      const double s = static_cast<double>(sse);
      if (!best.found || s < best.sse_after - 1e-11 * std::max(1.0, std::fabs(best.sse_after))) best = {true, f, t, s};
    }
  }
  return best;
}

// Central finite differences of the MLP loss with respect to every parameter.
template <class LossFn>
helio::MlpGradients finite_difference(helio::MlpModel model, LossFn loss, double h = 1e-5) {
  helio::MlpGradients g;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    Eigen::MatrixXd gw(model.weights[l].rows(), model.weights[l].cols());
    for (Eigen::Index r = 0; r < gw.rows(); ++r)
      for (Eigen::Index c = 0; c < gw.cols(); ++c) {
        const double w0 = model.weights[l](r, c);
        model.weights[l](r, c) = w0 + h;
        const double up = loss(model);
        model.weights[l](r, c) = w0 - h;
        const double dn = loss(model);
        model.weights[l](r, c) = w0;
        gw(r, c) = (up - dn) / (2.0 * h);
      }
    Eigen::VectorXd gb(model.biases[l].size());
    for (Eigen::Index r = 0; r < gb.size(); ++r) {
      const double b0 = model.biases[l](r);
      model.biases[l](r) = b0 + h;
      const double up = loss(model);
      model.biases[l](r) = b0 - h;
      const double dn = loss(model);
      model.biases[l](r) = b0;
      gb(r) = (up - dn) / (2.0 * h);
    }
    g.weights.push_back(std::move(gw));
    g.biases.push_back(std::move(gb));
  }
  return g;
}

// Plain MLP forward pass written with loops (no Eigen products).
inline double mlp_forward(const helio::MlpModel& m, std::span<const double> x) {
  std::vector<double> a(x.begin(), x.end());
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    const auto& w = m.weights[l];
    std::vector<double> z(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      double s = m.biases[l](r);
      for (Eigen::Index c = 0; c < w.cols(); ++c) s += w(r, c) * a[static_cast<std::size_t>(c)];
      z[static_cast<std::size_t>(r)] = (l + 1 < m.weights.size()) ? std::max(s, 0.0) : s;
    }
    a = std::move(z);
  }
  return a[0] * m.target_scale + m.target_mean;
}

// Cover-weighted expectation of a tree with the features in `known` fixed.
inline double tree_value(const helio::Tree& t, std::span<const double> x, std::uint32_t known, std::size_t i = 0) {
  const auto& n = t.nodes[i];
  if (n.is_leaf()) return n.value;
  const auto f = static_cast<std::size_t>(n.feature);
  const auto& l = t.nodes[static_cast<std::size_t>(n.left)];
  const auto& r = t.nodes[static_cast<std::size_t>(n.right)];
  if (known >> f & 1U) return tree_value(t, x, known, static_cast<std::size_t>(x[f] < n.threshold ? n.left : n.right));
  const double wl = n.n_samples > 0 ? static_cast<double>(l.n_samples) / static_cast<double>(n.n_samples) : 0.5;
  const double wr = n.n_samples > 0 ? static_cast<double>(r.n_samples) / static_cast<double>(n.n_samples) : 0.5;
  return wl * tree_value(t, x, known, static_cast<std::size_t>(n.left)) +
         wr * tree_value(t, x, known, static_cast<std::size_t>(n.right));
}

// Shapley values as the average marginal contribution over all d! feature
// orderings (the permutation form of the definition).
inline std::vector<double> permutation_shapley(const helio::Tree& t, std::span<const double> x) {
  const std::size_t d = t.feature_count;
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> phi(d, 0.0);
  std::size_t count = 0;
  do {
    std::uint32_t known = 0;
    double prev = tree_value(t, x, known);
    for (auto j : order) {
      known |= 1U << j;
      const double cur = tree_value(t, x, known);
      phi[j] += cur - prev;
      prev = cur;
    }
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  for (auto& p : phi) p /= static_cast<double>(count);
  return phi;
}

// Random tree over d features with random thresholds, leaf values and leaf
// covers; internal covers and values are derived from the leaves.
inline helio::Tree random_tree(Gen& g, std::size_t d, std::size_t max_depth, bool allow_empty_leaves = false) {
  helio::Tree t;
  t.feature_count = d;
  auto grow = [&](auto&& self, std::size_t depth) -> std::int32_t {
    const auto id = static_cast<std::int32_t>(t.nodes.size());
    t.nodes.emplace_back();
    if (depth < max_depth && (depth == 0 || g.uniform() < 0.75)) {
      t.nodes[id].feature = static_cast<std::int32_t>(g.below(d));
      t.nodes[id].threshold = g.uniform(-1.0, 1.0);
      const auto l = self(self, depth + 1);
      const auto r = self(self, depth + 1);
      t.nodes[id].left = l;
      t.nodes[id].right = r;
    } else {
      t.nodes[id].value = g.uniform(-10.0, 10.0);
      t.nodes[id].n_samples = static_cast<std::int64_t>(g.below(50)) + (allow_empty_leaves ? 0 : 1);
    }
    return id;
  };
  grow(grow, 0);
  helio::finalize_internal_nodes(t);
  return t;
}

// GP posterior written from the textbook formulas with an explicit inverse.
struct GpDirect {
  Eigen::MatrixXd x;  // n x d
  Eigen::VectorXd y;
  std::vector<double> ls;
  double signal = 1.0, noise = 1e-6;

  double k(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    double r2 = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i) r2 += std::pow((a(i) - b(i)) / ls[static_cast<std::size_t>(i)], 2);
    const double r = std::sqrt(r2);
    const double s5 = std::sqrt(5.0);
    return signal * (1 + s5 * r + 5.0 * r2 / 3.0) * std::exp(-s5 * r);
  }
  // Mean in the units of y, standardizing y first as the surrogate does.
  std::pair<double, double> posterior(const Eigen::VectorXd& p) const {
    const auto n = x.rows();
    const double mu = y.mean();
    const double sd = std::sqrt((y.array() - mu).square().mean());
    const double scale = sd > 0 ? sd : 1.0;
    Eigen::MatrixXd K(n, n);
    Eigen::VectorXd ks(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      ks(i) = k(x.row(i).transpose(), p);
      for (Eigen::Index j = 0; j < n; ++j) K(i, j) = k(x.row(i).transpose(), x.row(j).transpose());
    }
    K.diagonal().array() += noise;
    const Eigen::MatrixXd Ki = K.inverse();
    const Eigen::VectorXd ys = (y.array() - mu) / scale;
    const double m = ks.dot(Ki * ys);
    const double v = signal - ks.dot(Ki * ks);
    return {mu + scale * m, scale * scale * std::max(v, 0.0)};
  }
};

}  // namespace oracle
