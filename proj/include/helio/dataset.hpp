// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "helio/matrix.hpp"

namespace helio {

enum class ColumnKind { feature, target, excluded };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::feature;
  std::string unit;

  friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

using ColumnSchema = std::vector<ColumnSpec>;

// Throws InvalidConfig unless exactly one target exists and names are unique and non-empty.
void validate_schema(const ColumnSchema& schema);

// Eight-column hourly weather schema: irradiance target plus seven features.
ColumnSchema weather_schema();

struct TabularDataset {
  ColumnSchema schema;
  Matrix rows;                 // n x (feature columns), schema order
  std::vector<double> target;  // length n

  std::size_t row_count() const noexcept { return target.size(); }
  std::size_t feature_count() const noexcept { return rows.cols(); }
  std::vector<std::string> feature_names() const;
  std::string target_name() const;
  // Position of a feature column within `rows`, if present.
  std::optional<std::size_t> feature_index(const std::string& name) const;

  TabularDataset subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const TabularDataset&, const TabularDataset&) = default;
};

// Maps schema column names to CSV header names; absent entries map to themselves.
using ColumnMapping = std::map<std::string, std::string>;

TabularDataset load_csv(const std::filesystem::path& path, const ColumnSchema& schema,
                        const ColumnMapping& mapping = {});
// Writes schema columns (excluded ones omitted) with %.17g precision.
void write_csv(const std::filesystem::path& path, const TabularDataset& ds);

enum class CleanPolicy { drop_row, fail };

TabularDataset clean(const TabularDataset& ds, CleanPolicy policy = CleanPolicy::drop_row);

struct StandardizationParams {
  std::vector<std::string> names;
  std::vector<double> mean;
  std::vector<double> stddev;  // population convention, strictly positive

  std::size_t size() const noexcept { return mean.size(); }
  friend bool operator==(const StandardizationParams&, const StandardizationParams&) = default;
};

StandardizationParams fit_standardizer(const TabularDataset& ds);
TabularDataset apply_standardizer(const TabularDataset& ds, const StandardizationParams& params);
TabularDataset invert_standardizer(const TabularDataset& ds, const StandardizationParams& params);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;

  friend bool operator==(const SplitIndices&, const SplitIndices&) = default;
};

SplitIndices split_train_test(std::size_t row_count, double train_fraction, std::uint64_t seed,
                              bool shuffle = true);
inline SplitIndices split_train_test(const TabularDataset& ds, double train_fraction, std::uint64_t seed,
                                     bool shuffle = true) {
  return split_train_test(ds.row_count(), train_fraction, seed, shuffle);
}

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;

  std::vector<std::size_t> train_indices(std::size_t fold) const;
  std::vector<std::size_t> validation_indices(std::size_t fold) const;

  friend bool operator==(const FoldPlan&, const FoldPlan&) = default;
};

FoldPlan make_folds(std::size_t n, std::size_t k, std::uint64_t seed);

// Coefficients of the irradiance model inside the synthetic generator.
struct SynthCoefficients {
  double base = 0.65;
  double temperature = 0.015;
  double humidity = -0.004;
  double wind_direction = 0.1;
  double noise_sd = 20.0;
};

// Noise column ids used as stream_b in counter_normal/counter_uniform(seed, row, id, 0).
namespace synth_column {
inline constexpr std::uint64_t temperature = 0;
inline constexpr std::uint64_t humidity = 1;
inline constexpr std::uint64_t pressure = 2;
inline constexpr std::uint64_t wind_speed = 3;
inline constexpr std::uint64_t wind_direction = 4;
inline constexpr std::uint64_t irradiance = 5;
}  // namespace synth_column

TabularDataset synth_generate(std::size_t n_hours, std::uint64_t seed, const SynthCoefficients& coef = {});

// Replaces the named degree column with <name>_sin and <name>_cos.
TabularDataset encode_cyclic(const TabularDataset& ds, const std::string& column);

// Appends `count` standard-normal feature columns noise_0.. drawn from the noise stream of `seed`.
TabularDataset add_noise_features(const TabularDataset& ds, std::size_t count, std::uint64_t seed);

// Keeps only the named feature columns, in the given order.
TabularDataset project_features(const TabularDataset& ds, std::span<const std::string> names);

}  // namespace helio
