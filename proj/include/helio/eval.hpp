// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "helio/dataset.hpp"
#include "helio/model.hpp"

namespace helio {

// Both throw LengthMismatch for unequal lengths and Empty for zero length.
double mae(std::span<const double> pred, std::span<const double> actual);
double rmse(std::span<const double> pred, std::span<const double> actual);
// Throws ConstantActual when actual has zero variance.
double r2(std::span<const double> pred, std::span<const double> actual);

struct MetricsReport {
  double mae = 0.0;
  double rmse = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

MetricsReport score(std::span<const double> pred, std::span<const double> actual);

// Metrics over the test rows of `split`, in target units.
MetricsReport evaluate(const ModelBundle& model, const TabularDataset& ds, const SplitIndices& split);
MetricsReport evaluate(const ModelBundle& model, const TabularDataset& ds);

struct NamedModel {
  std::string name;
  const ModelBundle* model = nullptr;
};

struct ComparisonRow {
  std::string model_name;
  MetricsReport metrics;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;  // ascending rmse, ties by name
};

ComparisonTable compare(std::span<const NamedModel> models, const TabularDataset& ds, const SplitIndices& split);
// Sorts pre-computed rows by the table ordering.
ComparisonTable make_table(std::vector<ComparisonRow> rows);

struct LabeledDataset {
  std::string label;
  std::string distance_note;
  TabularDataset ds;
};

struct TransferRow {
  std::string label;
  std::string distance_note;
  MetricsReport metrics;
};

struct TransferReport {
  std::vector<TransferRow> rows;  // home first
};

// Home row scores the test rows of home_split; away rows score every row.
TransferReport transfer_test(const ModelBundle& model, const LabeledDataset& home, const SplitIndices& home_split,
                             std::span<const LabeledDataset> away);

// CSV columns: model, rmse, mae, r2, n.
void write_comparison_csv(const std::filesystem::path& path, const ComparisonTable& table);
// CSV columns: location, distance_note, rmse, mae, r2, n.
void write_transfer_csv(const std::filesystem::path& path, const TransferReport& report);
nlohmann::json to_json(const MetricsReport& m);
nlohmann::json to_json(const ComparisonTable& t);
nlohmann::json to_json(const TransferReport& t);

}  // namespace helio
