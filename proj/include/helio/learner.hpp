// SPDX-License-Identifier: Apache-2.0
//
// Learner specifications that bundle a model kind, its hyperparameters and the
// preprocessing it needs, plus the closures used by cross-validation code.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "helio/dataset.hpp"
#include "helio/features.hpp"
#include "helio/model.hpp"

namespace helio {

enum class LearnerKind { forest, boosted, mlp };

std::string_view learner_name(LearnerKind kind) noexcept;
LearnerKind parse_learner(std::string_view name);  // InvalidConfig on unknown names

struct LearnerSpec {
  LearnerKind kind = LearnerKind::forest;
  ForestConfig forest;
  BoostConfig boosted;
  MlpTrainConfig mlp;
  std::vector<std::size_t> hidden{10, 5, 5};
  // PCC selection fitted on the training rows; applied before standardization.
  std::optional<SelectionRule> selection;
  // Input z-scoring fitted on the training rows (always on for the MLP).
  bool standardize_inputs = false;

  void validate() const;
};

// Fits preprocessing and model on `train`; the bundle re-applies the frozen
// preprocessing when scoring other data.
ModelBundle fit_learner(const LearnerSpec& spec, const TabularDataset& train);

using Predictor = std::function<std::vector<double>(const TabularDataset&)>;
using FitFn = std::function<Predictor(const TabularDataset& train)>;

FitFn make_fit_fn(const LearnerSpec& spec);

}  // namespace helio
