// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "helio/matrix.hpp"

namespace helio {

// Node of a binary regression tree stored in a flat array. Samples with
// x[feature] < threshold go left, the rest go right.
struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;         // leaf output; for internal nodes the mean of their samples
  std::int64_t n_samples = 0; // training cover

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t feature_count = 0;

  double predict(std::span<const double> x) const noexcept {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
      const auto& n = nodes[i];
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right);
    }
    return nodes[i].value;
  }

  std::size_t depth() const;
  std::size_t leaf_count() const;

  friend bool operator==(const Tree&, const Tree&) = default;
};

struct MaxFeatures {
  enum class Kind { all, sqrt, fraction };
  Kind kind = Kind::all;
  double fraction = 1.0;

  std::size_t resolve(std::size_t feature_count) const;
  friend bool operator==(const MaxFeatures&, const MaxFeatures&) = default;
};

struct TreeParams {
  std::optional<std::size_t> max_depth;  // unlimited when empty
  std::size_t min_leaf = 1;
  double min_impurity_decrease = 0.0;
  MaxFeatures max_features;
  std::uint64_t seed = 0;
  std::uint64_t tree_index = 0;  // selects the per-tree feature-subset stream
};

// Greedy CART regression tree. Splits maximize the reduction in summed squared
// error; thresholds are midpoints between adjacent distinct values; ties go to
// the lowest feature index, then the lowest threshold. A split is kept when its
// reduction is positive and reduction / n_total >= min_impurity_decrease.
Tree fit_tree(const Matrix& x, std::span<const double> y, const TreeParams& params);

// Same, on the given row multiset (rows may repeat, as in a bootstrap sample).
Tree fit_tree_on_rows(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                      const TreeParams& params);

// Recomputes internal-node covers and values from their children (covers add,
// values are cover-weighted means). Node order must be parent-before-child.
void finalize_internal_nodes(Tree& tree);

// Renumbers nodes in depth-first order (node, left subtree, right subtree), the
// order in which serialized trees are read back.
void to_preorder(Tree& tree);

// Throws DimensionMismatch when x has the wrong width.
double predict_tree(const Tree& tree, std::span<const double> x);

}  // namespace helio
