// SPDX-License-Identifier: Apache-2.0
#include "helio/forest.hpp"

#include <numeric>
#include <string>

#include "helio/error.hpp"
#include "helio/parallel.hpp"
#include "helio/rng.hpp"

namespace helio {

void ForestConfig::validate() const {
  if (n_estimators < 1) fail(Errc::InvalidConfig, "n_estimators must be >= 1");
  if (max_depth && *max_depth < 1) fail(Errc::InvalidConfig, "max_depth must be >= 1");
  if (min_impurity_decrease < 0.0) fail(Errc::InvalidConfig, "min_impurity_decrease must be >= 0");
  if (min_leaf < 1) fail(Errc::InvalidConfig, "min_leaf must be >= 1");
  if (max_features.kind == MaxFeatures::Kind::fraction && !(max_features.fraction > 0.0 && max_features.fraction <= 1.0))
    fail(Errc::InvalidConfig, "max_features fraction must lie in (0, 1]");
}

ForestModel fit_forest(const Matrix& x, std::span<const double> y, const ForestConfig& config) {
  config.validate();
  const std::size_t n = x.rows();
  if (n < 2) fail(Errc::TooFewSamples, "forest needs at least 2 samples, got " + std::to_string(n));
  if (y.size() != n) fail(Errc::DimensionMismatch, "forest: row and target counts differ");

  ForestModel model;
  model.config = config;
  model.feature_count = x.cols();
  model.trees.resize(config.n_estimators);

  parallel_for(config.n_estimators, [&](std::size_t t) {
    std::vector<std::size_t> rows(n);
    if (config.bootstrap) {
      CounterRng rng(config.seed, StreamTag::bootstrap, t);
      for (auto& r : rows) r = static_cast<std::size_t>(rng.below(n));
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    TreeParams params;
    params.max_depth = config.max_depth;
    params.min_leaf = config.min_leaf;
    params.min_impurity_decrease = config.min_impurity_decrease;
    params.max_features = config.max_features;
    params.seed = config.seed;
    params.tree_index = t;
    model.trees[t] = fit_tree_on_rows(x, y, rows, params);
  });
  return model;
}

std::vector<double> predict_forest(const ForestModel& model, const Matrix& x) {
  if (x.cols() != model.feature_count)
    fail(Errc::DimensionMismatch, "forest expects " + std::to_string(model.feature_count) + " features, got " +
                                      std::to_string(x.cols()));
  std::vector<double> out(x.rows(), 0.0);
  const double scale = 1.0 / static_cast<double>(model.trees.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    double s = 0.0;
    for (const auto& t : model.trees) s += t.predict(row);
    out[r] = s * scale;
  }
  return out;
}

}  // namespace helio
