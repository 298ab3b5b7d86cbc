// SPDX-License-Identifier: Apache-2.0
#include "helio/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "helio/error.hpp"
#include "helio/rng.hpp"

namespace helio {

std::size_t Tree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes[i].is_leaf()) {
      stack.emplace_back(static_cast<std::size_t>(nodes[i].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes[i].right), d + 1);
    }
  }
  return deepest;
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t MaxFeatures::resolve(std::size_t d) const {
  std::size_t k = d;
  switch (kind) {
    case Kind::all: k = d; break;
    case Kind::sqrt: k = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d)))); break;
    case Kind::fraction: k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(d))); break;
  }
  return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(d, 1));
}

namespace {

// Exact greedy builder. Each feature keeps the node's sample positions sorted
// by value; a node owns the same [begin, end) segment in every feature's
// ordering, and splitting stably partitions each segment.
class ExactBuilder {
 public:
  ExactBuilder(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows, const TreeParams& params)
      : params_(params),
        n_(rows.size()),
        d_(x.cols()),
        rng_(params.seed, StreamTag::feature_subset, params.tree_index) {
    y_.resize(n_);
    values_.assign(d_, std::vector<double>(n_));
    for (std::size_t p = 0; p < n_; ++p) {
      y_[p] = y[rows[p]];
      auto r = x.row(rows[p]);
      for (std::size_t f = 0; f < d_; ++f) values_[f][p] = r[f];
    }
    order_.assign(d_, std::vector<std::uint32_t>(n_));
    for (std::size_t f = 0; f < d_; ++f) {
      auto& ord = order_[f];
      std::iota(ord.begin(), ord.end(), 0U);
      const auto& v = values_[f];
      std::stable_sort(ord.begin(), ord.end(), [&](std::uint32_t a, std::uint32_t b) { return v[a] < v[b]; });
    }
    goes_left_.resize(n_);
    scratch_.resize(n_);
    features_.resize(d_);
    std::iota(features_.begin(), features_.end(), std::size_t{0});
    tree_.feature_count = d_;
  }

  Tree build() {
    grow(0, n_, 0);
    finalize_internal_nodes(tree_);
    return std::move(tree_);
  }

 private:
  struct Split {
    double gain = 0.0;
    std::size_t feature = 0;
    double threshold = 0.0;
    bool found = false;
  };

  std::int32_t grow(std::size_t begin, std::size_t end, std::size_t depth) {
    const auto id = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    const std::size_t count = end - begin;
    const auto& ord0 = order_[0];
    double sum = 0.0, lo = y_[ord0[begin]], hi = lo;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = y_[ord0[i]];
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double mean = sum / static_cast<double>(count);
    tree_.nodes[id].value = mean;
    tree_.nodes[id].n_samples = static_cast<std::int64_t>(count);

    const bool depth_ok = !params_.max_depth || depth < *params_.max_depth;
    if (!depth_ok || count < 2 * params_.min_leaf || lo == hi) return id;

    const Split split = best_split(begin, end, mean);
    if (!split.found || !(split.gain > 0.0) ||
        split.gain / static_cast<double>(n_) < params_.min_impurity_decrease)
      return id;

    const auto& fv = values_[split.feature];
    std::size_t n_left = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const auto p = ord0[i];
      goes_left_[p] = fv[p] < split.threshold ? 1 : 0;
      n_left += goes_left_[p];
    }
    for (auto& ord : order_) {
      std::size_t l = begin, r = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const auto p = ord[i];
        if (goes_left_[p]) ord[l++] = p;
        else scratch_[r++] = p;
      }
      std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(r), ord.begin() + static_cast<std::ptrdiff_t>(l));
    }

    tree_.nodes[id].feature = static_cast<std::int32_t>(split.feature);
    tree_.nodes[id].threshold = split.threshold;
    const auto left = grow(begin, begin + n_left, depth + 1);
    const auto right = grow(begin + n_left, end, depth + 1);
    tree_.nodes[id].left = left;
    tree_.nodes[id].right = right;
    return id;
  }

  std::span<const std::size_t> candidate_features() {
    const std::size_t k = params_.max_features.resolve(d_);
    if (k >= d_) {
      std::iota(features_.begin(), features_.end(), std::size_t{0});
      return features_;
    }
    std::iota(features_.begin(), features_.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + static_cast<std::size_t>(rng_.below(d_ - i));
      std::swap(features_[i], features_[j]);
    }
    std::sort(features_.begin(), features_.begin() + static_cast<std::ptrdiff_t>(k));
    return {features_.data(), k};
  }

  Split best_split(std::size_t begin, std::size_t end, double mean) {
    Split best;
    const std::size_t count = end - begin;
    const double n = static_cast<double>(count);
    double total = 0.0, sse = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double r = y_[order_[0][i]] - mean;
      total += r;
      sse += r * r;
    }
    const double parent = total * total / n;
    // Gains closer than this are ties: two features that induce the same
    // partition give equal gains that differ only by rounding.
    const double tie = 1e-11 * sse;
    const std::size_t min_leaf = params_.min_leaf;

    for (const std::size_t f : candidate_features()) {
      const auto& ord = order_[f];
      const auto& v = values_[f];
      double left_sum = 0.0;
      for (std::size_t i = begin; i + 1 < end; ++i) {
        left_sum += y_[ord[i]] - mean;
        const std::size_t n_left = i - begin + 1;
        const std::size_t n_right = count - n_left;
        const double a = v[ord[i]];
        const double b = v[ord[i + 1]];
        if (!(a < b) || n_left < min_leaf || n_right < min_leaf) continue;
        const double right_sum = total - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(n_left) +
                            right_sum * right_sum / static_cast<double>(n_right) - parent;
        if (!best.found || gain > best.gain + tie) {
          double t = a + (b - a) / 2.0;
          if (!(t > a)) t = b;
          best = {gain, f, t, true};
        }
      }
    }
    return best;
  }

  const TreeParams& params_;
  std::size_t n_;
  std::size_t d_;
  CounterRng rng_;
  std::vector<double> y_;
  std::vector<std::vector<double>> values_;
  std::vector<std::vector<std::uint32_t>> order_;
  std::vector<std::uint8_t> goes_left_;
  std::vector<std::uint32_t> scratch_;
  std::vector<std::size_t> features_;
  Tree tree_;
};

}  // namespace

void finalize_internal_nodes(Tree& tree) {
  for (std::size_t i = tree.nodes.size(); i-- > 0;) {
    auto& node = tree.nodes[i];
    if (node.is_leaf()) continue;
    const auto& l = tree.nodes[static_cast<std::size_t>(node.left)];
    const auto& r = tree.nodes[static_cast<std::size_t>(node.right)];
    node.n_samples = l.n_samples + r.n_samples;
    node.value = node.n_samples > 0 ? (l.value * static_cast<double>(l.n_samples) + r.value * static_cast<double>(r.n_samples)) /
                                          static_cast<double>(node.n_samples)
                                    : 0.5 * (l.value + r.value);
  }
}

void to_preorder(Tree& tree) {
  if (tree.nodes.empty()) return;
  std::vector<TreeNode> out;
  out.reserve(tree.nodes.size());
  auto visit = [&](auto&& self, std::size_t i) -> std::int32_t {
    const auto id = static_cast<std::int32_t>(out.size());
    out.push_back(tree.nodes[i]);
    if (!tree.nodes[i].is_leaf()) {
      const auto l = self(self, static_cast<std::size_t>(tree.nodes[i].left));
      const auto r = self(self, static_cast<std::size_t>(tree.nodes[i].right));
      out[static_cast<std::size_t>(id)].left = l;
      out[static_cast<std::size_t>(id)].right = r;
    }
    return id;
  };
  visit(visit, 0);
  tree.nodes = std::move(out);
}

Tree fit_tree_on_rows(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                      const TreeParams& params) {
  if (y.size() != x.rows())
    fail(Errc::DimensionMismatch, "fit_tree: " + std::to_string(x.rows()) + " rows but " + std::to_string(y.size()) + " targets");
  if (params.min_leaf < 1) fail(Errc::InvalidConfig, "min_leaf must be >= 1");
  if (params.min_impurity_decrease < 0.0) fail(Errc::InvalidConfig, "min_impurity_decrease must be >= 0");
  if (x.cols() == 0) fail(Errc::DimensionMismatch, "fit_tree: no feature columns");
  if (rows.size() < 2 * params.min_leaf || rows.empty())
    fail(Errc::TooFewSamples, "fit_tree: " + std::to_string(rows.size()) + " samples, need at least " +
                                  std::to_string(std::max<std::size_t>(2 * params.min_leaf, 1)));
  return ExactBuilder(x, y, rows, params).build();
}

Tree fit_tree(const Matrix& x, std::span<const double> y, const TreeParams& params) {
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return fit_tree_on_rows(x, y, rows, params);
}

double predict_tree(const Tree& tree, std::span<const double> x) {
  if (x.size() != tree.feature_count)
    fail(Errc::DimensionMismatch, "tree expects " + std::to_string(tree.feature_count) + " features, got " + std::to_string(x.size()));
  return tree.predict(x);
}

}  // namespace helio
