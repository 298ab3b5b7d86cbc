// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "helio/boost.hpp"
#include "helio/dataset.hpp"
#include "helio/forest.hpp"
#include "helio/mlp.hpp"

namespace helio {

using TrainedModel = std::variant<ForestModel, BoostedModel, MlpModel>;

std::string_view model_kind(const TrainedModel& model) noexcept;  // "forest", "boosted", "mlp"
bool is_tree_model(const TrainedModel& model) noexcept;
std::vector<double> predict(const TrainedModel& model, const Matrix& x);

// A trained model together with the frozen preprocessing needed to score raw
// tabular data: the feature columns it consumes (by name, in order) and an
// optional input standardizer fitted on the training rows.
struct ModelBundle {
  TrainedModel model;
  std::vector<std::string> feature_names;
  std::optional<StandardizationParams> input_scaling;

  // Projects, standardizes and predicts. Throws SchemaMismatch when a consumed
  // feature is absent from the dataset.
  std::vector<double> predict(const TabularDataset& ds) const;
  Matrix prepare(const TabularDataset& ds) const;
};

// JSON document: {format, kind, feature_names, input_scaling, config, ...}.
// Real values are hex-float strings so the round trip is bit-exact. Tree
// ensembles carry "trees": [nested nodes], leaves {value, n_samples}, internal
// nodes {feature_index, threshold, left, right}.
std::string model_to_json(const ModelBundle& bundle);
ModelBundle model_from_json(std::string_view text);
void save_model(const std::filesystem::path& path, const ModelBundle& bundle);
ModelBundle load_model(const std::filesystem::path& path);

}  // namespace helio
