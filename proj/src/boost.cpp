// SPDX-License-Identifier: Apache-2.0
#include "helio/boost.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "helio/error.hpp"

namespace helio {

namespace {

double midpoint(double a, double b) {
  const double t = a + (b - a) / 2.0;
  return t > a ? t : b;
}

}  // namespace

std::uint16_t BinEdges::bin(std::size_t feature, double value) const noexcept {
  const auto& e = edges[feature];
  return static_cast<std::uint16_t>(std::upper_bound(e.begin(), e.end(), value) - e.begin());
}

BinEdges compute_bin_edges(const Matrix& x, std::size_t n_bins) {
  if (n_bins < 2 || n_bins > std::numeric_limits<std::uint16_t>::max())
    fail(Errc::InvalidConfig, "n_bins must lie in [2, 65535]");
  BinEdges out;
  out.edges.resize(x.cols());
  const std::size_t n = x.rows();
  for (std::size_t f = 0; f < x.cols(); ++f) {
    auto v = x.column(f);
    std::sort(v.begin(), v.end());
    std::vector<double> distinct = v;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    auto& edges = out.edges[f];
    if (distinct.size() <= n_bins) {
      for (std::size_t i = 0; i + 1 < distinct.size(); ++i) edges.push_back(midpoint(distinct[i], distinct[i + 1]));
      continue;
    }
    for (std::size_t b = 1; b < n_bins; ++b) {
      const std::size_t rank = (2 * b * n + n_bins) / (2 * n_bins);  // round(b * n / n_bins)
      if (rank == 0 || rank >= n) continue;
      const double lo = v[rank - 1];
      const auto above = std::upper_bound(v.begin(), v.end(), lo);
      if (above == v.end()) continue;
      edges.push_back(midpoint(lo, *above));
    }
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  }
  return out;
}

BinnedMatrix apply_bins(const Matrix& x, const BinEdges& edges) {
  BinnedMatrix out;
  out.rows = x.rows();
  out.cols = x.cols();
  out.bins.resize(out.rows * out.cols);
  for (std::size_t f = 0; f < out.cols; ++f)
    for (std::size_t r = 0; r < out.rows; ++r) out.bins[f * out.rows + r] = edges.bin(f, x(r, f));
  return out;
}

Histograms build_histograms(const Matrix& x, std::size_t n_bins) {
  Histograms h;
  h.edges = compute_bin_edges(x, n_bins);
  h.binned = apply_bins(x, h.edges);
  return h;
}

void BoostConfig::validate() const {
  if (n_rounds < 1) fail(Errc::InvalidConfig, "n_rounds must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) fail(Errc::InvalidConfig, "learning_rate must lie in (0, 1]");
  if (max_depth < 1) fail(Errc::InvalidConfig, "max_depth must be >= 1");
  if (n_bins < 2) fail(Errc::InvalidConfig, "n_bins must be >= 2");
  if (l2_leaf < 0.0) fail(Errc::InvalidConfig, "l2_leaf must be >= 0");
}

namespace {

struct NodeStats {
  double g = 0.0;
  std::size_t n = 0;
};

class BoostTreeBuilder {
 public:
  BoostTreeBuilder(const Histograms& hist, const BoostConfig& cfg, std::span<const double> grad)
      : hist_(hist), cfg_(cfg), grad_(grad), l2_(cfg.order == BoostOrder::second ? cfg.l2_leaf : 0.0) {}

  // Fills leaf_value[i] with the new tree's output for training row i.
  Tree build(std::vector<double>& leaf_value) {
    tree_ = Tree{};
    tree_.feature_count = hist_.binned.cols;
    leaf_value_ = &leaf_value;
    std::vector<std::uint32_t> rows(hist_.binned.rows);
    std::iota(rows.begin(), rows.end(), 0U);
    if (cfg_.tree_shape == TreeShape::free) {
      grow_free(rows, 0);
    } else {
      grow_symmetric(std::move(rows));
      to_preorder(tree_);
    }
    finalize_internal_nodes(tree_);
    return std::move(tree_);
  }

 private:
  double score(double g, std::size_t n) const {
    const double denom = static_cast<double>(n) + l2_;
    return denom > 0.0 ? g * g / denom : 0.0;
  }
  double leaf(double g, std::size_t n) const {
    const double denom = static_cast<double>(n) + l2_;
    return denom > 0.0 ? -g / denom : 0.0;
  }

  NodeStats stats(std::span<const std::uint32_t> rows) const {
    NodeStats s;
    for (auto r : rows) s.g += grad_[r];
    s.n = rows.size();
    return s;
  }

  std::int32_t new_node(const NodeStats& s) {
    const auto id = static_cast<std::int32_t>(tree_.nodes.size());
    TreeNode node;
    node.value = leaf(s.g, s.n);
    node.n_samples = static_cast<std::int64_t>(s.n);
    tree_.nodes.push_back(node);
    return id;
  }

  void fill_histogram(std::size_t f, std::span<const std::uint32_t> rows, std::vector<NodeStats>& h) const {
    h.assign(hist_.edges.bin_count(f), NodeStats{});
    const auto col = hist_.binned.column(f);
    for (auto r : rows) {
      auto& cell = h[col[r]];
      cell.g += grad_[r];
      ++cell.n;
    }
  }

  std::int32_t grow_free(std::vector<std::uint32_t>& rows, std::size_t depth) {
    const NodeStats s = stats(rows);
    const auto id = new_node(s);
    if (depth >= cfg_.max_depth || rows.size() < 2) {
      for (auto r : rows) (*leaf_value_)[r] = tree_.nodes[id].value;
      return id;
    }

    const double parent = score(s.g, s.n);
    double best_gain = 0.0;
    std::size_t best_f = 0, best_k = 0;
    bool found = false;
    std::vector<NodeStats> h;
    for (std::size_t f = 0; f < hist_.binned.cols; ++f) {
      fill_histogram(f, rows, h);
      NodeStats left;
      for (std::size_t k = 0; k + 1 < h.size(); ++k) {
        left.g += h[k].g;
        left.n += h[k].n;
        const std::size_t n_right = s.n - left.n;
        if (left.n == 0 || n_right == 0) continue;
        const double gain = score(left.g, left.n) + score(s.g - left.g, n_right) - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_f = f;
          best_k = k;
          found = true;
        }
      }
    }
    if (!found) {
      for (auto r : rows) (*leaf_value_)[r] = tree_.nodes[id].value;
      return id;
    }

    std::vector<std::uint32_t> left_rows, right_rows;
    const auto col = hist_.binned.column(best_f);
    for (auto r : rows) (col[r] <= best_k ? left_rows : right_rows).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    tree_.nodes[id].feature = static_cast<std::int32_t>(best_f);
    tree_.nodes[id].threshold = hist_.edges.edges[best_f][best_k];
    const auto l = grow_free(left_rows, depth + 1);
    const auto r = grow_free(right_rows, depth + 1);
    tree_.nodes[id].left = l;
    tree_.nodes[id].right = r;
    return id;
  }

  void grow_symmetric(std::vector<std::uint32_t> all_rows) {
    struct Leaf {
      std::int32_t node;
      std::vector<std::uint32_t> rows;
      NodeStats s;
    };
    std::vector<Leaf> level;
    {
      Leaf root{0, std::move(all_rows), {}};
      root.s = stats(root.rows);
      root.node = new_node(root.s);
      level.push_back(std::move(root));
    }

    std::vector<NodeStats> h;
    for (std::size_t depth = 0; depth < cfg_.max_depth; ++depth) {
      std::size_t best_f = 0, best_k = 0;
      double best_gain = 0.0;
      bool found = false;
      for (std::size_t f = 0; f < hist_.binned.cols; ++f) {
        const std::size_t nb = hist_.edges.bin_count(f);
        std::vector<double> gain(nb > 0 ? nb - 1 : 0, 0.0);
        for (const auto& lf : level) {
          if (lf.s.n == 0) continue;
          fill_histogram(f, lf.rows, h);
          const double parent = score(lf.s.g, lf.s.n);
          NodeStats left;
          for (std::size_t k = 0; k + 1 < nb; ++k) {
            left.g += h[k].g;
            left.n += h[k].n;
            gain[k] += score(left.g, left.n) + score(lf.s.g - left.g, lf.s.n - left.n) - parent;
          }
        }
        for (std::size_t k = 0; k < gain.size(); ++k) {
          if (gain[k] > best_gain) {
            best_gain = gain[k];
            best_f = f;
            best_k = k;
            found = true;
          }
        }
      }
      if (!found) break;

      const double threshold = hist_.edges.edges[best_f][best_k];
      const auto col = hist_.binned.column(best_f);
      std::vector<Leaf> next;
      next.reserve(level.size() * 2);
      for (auto& lf : level) {
        Leaf l{0, {}, {}}, r{0, {}, {}};
        for (auto row : lf.rows) (col[row] <= best_k ? l.rows : r.rows).push_back(row);
        l.s = stats(l.rows);
        r.s = stats(r.rows);
        l.node = new_node(l.s);
        r.node = new_node(r.s);
        auto& parent = tree_.nodes[static_cast<std::size_t>(lf.node)];
        parent.feature = static_cast<std::int32_t>(best_f);
        parent.threshold = threshold;
        parent.left = l.node;
        parent.right = r.node;
        next.push_back(std::move(l));
        next.push_back(std::move(r));
      }
      level = std::move(next);
    }
    for (const auto& lf : level)
      for (auto r : lf.rows) (*leaf_value_)[r] = tree_.nodes[static_cast<std::size_t>(lf.node)].value;
  }

  const Histograms& hist_;
  const BoostConfig& cfg_;
  std::span<const double> grad_;
  double l2_ = 0.0;
  Tree tree_;
  std::vector<double>* leaf_value_ = nullptr;
};

}  // namespace

BoostedModel fit_boosted(const Matrix& x, std::span<const double> y, const BoostConfig& config) {
  config.validate();
  const std::size_t n = x.rows();
  if (n < 2) fail(Errc::TooFewSamples, "boosting needs at least 2 samples, got " + std::to_string(n));
  if (y.size() != n) fail(Errc::DimensionMismatch, "boosting: row and target counts differ");

  const Histograms hist = build_histograms(x, config.n_bins);
  BoostedModel model;
  model.config = config;
  model.feature_count = x.cols();
  model.base_score = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);

  std::vector<double> pred(n, model.base_score);
  std::vector<double> grad(n);
  std::vector<double> leaf_value(n);
  BoostTreeBuilder builder(hist, config, grad);
  model.trees.reserve(config.n_rounds);
  for (std::size_t round = 0; round < config.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) grad[i] = pred[i] - y[i];
    model.trees.push_back(builder.build(leaf_value));
    for (std::size_t i = 0; i < n; ++i) pred[i] += config.learning_rate * leaf_value[i];
  }
  return model;
}

std::vector<double> predict_boosted(const BoostedModel& model, const Matrix& x, std::optional<std::size_t> n_rounds) {
  if (x.cols() != model.feature_count)
    fail(Errc::DimensionMismatch, "boosted model expects " + std::to_string(model.feature_count) + " features, got " +
                                      std::to_string(x.cols()));
  const std::size_t rounds = n_rounds.value_or(model.trees.size());
  if (rounds > model.trees.size())
    fail(Errc::BadRound, "requested " + std::to_string(rounds) + " rounds, model has " + std::to_string(model.trees.size()));
  std::vector<double> out(x.rows());
  const double lr = model.config.learning_rate;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    double s = model.base_score;
    for (std::size_t t = 0; t < rounds; ++t) s += lr * model.trees[t].predict(row);
    out[r] = s;
  }
  return out;
}

}  // namespace helio
