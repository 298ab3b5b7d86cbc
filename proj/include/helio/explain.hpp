// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "helio/boost.hpp"
#include "helio/dataset.hpp"
#include "helio/forest.hpp"
#include "helio/learner.hpp"
#include "helio/model.hpp"

namespace helio {

// Row-major n x d Shapley values. For every row, base_value + sum(phi row)
// reproduces the model prediction.
struct AttributionMatrix {
  double base_value = 0.0;
  Matrix phi;
  std::vector<std::string> feature_names;
};

// Path-dependent tree SHAP. Expectations weight each child by its share of the
// parent's training cover; a node with zero cover weights both children 0.5.
std::vector<double> tree_shap_row(const Tree& tree, std::span<const double> x);
AttributionMatrix tree_shap(const ForestModel& model, const Matrix& x);
AttributionMatrix tree_shap(const BoostedModel& model, const Matrix& x);
// Prepares `ds` through the bundle's frozen preprocessing; NotATreeModel for the MLP.
AttributionMatrix tree_shap(const ModelBundle& bundle, const TabularDataset& ds);

// Expectation of the tree output when only features with known[j] set are fixed to x.
double tree_conditional_expectation(const Tree& tree, std::span<const double> x, const std::vector<bool>& known);

// Exhaustive Shapley enumeration over all feature subsets using the same
// cover-weighted expectation. TooManyFeatures above 12 features.
std::vector<double> brute_force_shapley(const Tree& tree, std::span<const double> x);
std::vector<double> brute_force_shapley(const ForestModel& model, std::span<const double> x);
std::vector<double> brute_force_shapley(const BoostedModel& model, std::span<const double> x);

struct FeatureImportance {
  std::string feature;
  double mean_abs_shap = 0.0;
  double sign_profile = 0.0;  // pearson(feature value, phi); 0 when either is constant
};

struct ImportanceSummary {
  std::vector<FeatureImportance> features;  // descending mean_abs_shap, ties in column order
};

ImportanceSummary importance_summary(const AttributionMatrix& attr, const Matrix& feature_values);

// CSV columns row, feature, value, phi.
void write_attribution_csv(const std::filesystem::path& path, const AttributionMatrix& attr, const Matrix& values);
// CSV columns feature, mean_abs_shap, sign_profile.
void write_summary_csv(const std::filesystem::path& path, const ImportanceSummary& summary);

struct LearningCurve {
  std::vector<std::size_t> train_sizes;  // mean CV-train subset size per fraction
  std::vector<double> fractions;
  std::vector<double> train_mae;
  std::vector<double> val_mae;
};

// For each fraction f and each fold, trains on ceil(f * |fold train|) rows of
// the fold's training split (a seeded subset, kept in index order) and
// averages training and validation MAE over folds.
LearningCurve learning_curve(const FitFn& fit, const TabularDataset& ds, std::span<const double> fractions,
                             const FoldPlan& folds, std::uint64_t seed);

void write_curve_csv(const std::filesystem::path& path, const LearningCurve& curve);

}  // namespace helio
