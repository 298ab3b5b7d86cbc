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

// Defaults follow the tuned random-forest table: 400 trees, unlimited depth,
// no impurity floor, bootstrap on, all features per split, random state 0.
struct ForestConfig {
  std::size_t n_estimators = 400;
  std::optional<std::size_t> max_depth;
  double min_impurity_decrease = 0.0;
  bool bootstrap = true;
  MaxFeatures max_features;
  std::size_t min_leaf = 1;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const ForestConfig&, const ForestConfig&) = default;
};

struct ForestModel {
  std::vector<Tree> trees;
  ForestConfig config;
  std::size_t feature_count = 0;

  friend bool operator==(const ForestModel&, const ForestModel&) = default;
};

// Tree t trains on a bootstrap sample drawn from the (seed, bootstrap, t) stream,
// so the result does not depend on how trees are scheduled across threads.
ForestModel fit_forest(const Matrix& x, std::span<const double> y, const ForestConfig& config);

std::vector<double> predict_forest(const ForestModel& model, const Matrix& x);

}  // namespace helio
