// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "helio/matrix.hpp"
#include "helio/tree.hpp"

namespace helio {

// Per-feature quantile bin edges. A value's bin is the number of edges <= value,
// so "bin <= k" is the same test as "value < edges[k]".
struct BinEdges {
  std::vector<std::vector<double>> edges;

  std::size_t bin_count(std::size_t feature) const noexcept { return edges[feature].size() + 1; }
  std::uint16_t bin(std::size_t feature, double value) const noexcept;
};

// Column-major bin indices.
struct BinnedMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint16_t> bins;

  std::span<const std::uint16_t> column(std::size_t c) const noexcept { return {bins.data() + c * rows, rows}; }
};

struct Histograms {
  BinEdges edges;
  BinnedMatrix binned;
};

// At most n_bins bins per feature. Features with <= n_bins distinct values get
// one bin per value; otherwise cuts fall at ranks round(b * n / n_bins). Every
// edge is a midpoint between adjacent observed values.
BinEdges compute_bin_edges(const Matrix& x, std::size_t n_bins);
BinnedMatrix apply_bins(const Matrix& x, const BinEdges& edges);
Histograms build_histograms(const Matrix& x, std::size_t n_bins);

enum class BoostOrder { first, second };
enum class TreeShape { free, symmetric };

// Defaults: 300 rounds, learning rate 0.1, depth 6, 64 bins, l2 1.0.
struct BoostConfig {
  std::size_t n_rounds = 300;
  double learning_rate = 0.1;
  std::size_t max_depth = 6;
  BoostOrder order = BoostOrder::second;
  TreeShape tree_shape = TreeShape::free;
  std::size_t n_bins = 64;
  double l2_leaf = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const BoostConfig&, const BoostConfig&) = default;
};

// Squared-error boosting. prediction = base_score + learning_rate * sum(tree outputs).
struct BoostedModel {
  double base_score = 0.0;
  std::vector<Tree> trees;
  BoostConfig config;
  std::size_t feature_count = 0;

  friend bool operator==(const BoostedModel&, const BoostedModel&) = default;
};

// Each round fits a tree on histogram bins to g = prediction - y (h = 1).
// First order: leaf = -sum(g) / n, split score sum(g)^2 / n.
// Second order: leaf = -sum(g) / (sum(h) + l2), split score sum(g)^2 / (sum(h) + l2).
// Symmetric trees use one (feature, threshold) per level, chosen by the summed
// score across the level; the level's empty children become zero-valued leaves.
BoostedModel fit_boosted(const Matrix& x, std::span<const double> y, const BoostConfig& config);

// Uses the first n_rounds trees (all when empty). Throws BadRound, DimensionMismatch.
std::vector<double> predict_boosted(const BoostedModel& model, const Matrix& x,
                                    std::optional<std::size_t> n_rounds = std::nullopt);

}  // namespace helio
