// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "helio/dataset.hpp"

namespace helio {

// Population Pearson correlation. Throws LengthMismatch, ConstantVector.
double pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationEntry {
  std::string name;
  double pcc = 0.0;
  bool constant = false;  // pcc is reported as 0 for constant columns
};

// One entry per feature column in schema order.
struct CorrelationReport {
  std::vector<CorrelationEntry> entries;
};

CorrelationReport correlation_report(const TabularDataset& ds);

// CSV (feature, pcc) sorted by descending |pcc|, ties in schema order.
void write_correlation_csv(const std::filesystem::path& path, const CorrelationReport& report);

struct ThresholdRule {
  double t = 0.5;
};
struct TopKRule {
  std::size_t k = 5;
};
using SelectionRule = std::variant<ThresholdRule, TopKRule>;

struct FeatureSelection {
  std::vector<std::string> selected;  // descending |pcc|
  SelectionRule rule;
};

FeatureSelection select_features(const CorrelationReport& report, const SelectionRule& rule);

}  // namespace helio
