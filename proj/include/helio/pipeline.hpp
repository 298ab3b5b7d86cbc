// SPDX-License-Identifier: Apache-2.0
//
// End-to-end commands driven by a single JSON configuration document.
#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "helio/dataset.hpp"
#include "helio/error.hpp"
#include "helio/eval.hpp"
#include "helio/learner.hpp"
#include "helio/tuner.hpp"

namespace helio {

struct DataConfig {
  enum class Source { synthetic, csv };
  Source source = Source::synthetic;
  // synthetic
  std::size_t n = 8760;
  std::uint64_t seed = 42;
  SynthCoefficients coefficients;
  // csv
  std::filesystem::path path;
  ColumnMapping mapping;
  CleanPolicy clean = CleanPolicy::drop_row;
  // post-processing, applied to either source
  std::vector<std::string> cyclic;  // degree columns replaced by _sin/_cos pairs
  std::size_t noise_features = 0;
  std::uint64_t noise_seed = 0;
};

struct SplitConfig {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  bool shuffle = true;
};

struct TuneSection {
  ParamSpace space;
  TunerConfig tuner;
};

struct CurveSection {
  std::vector<double> fractions{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::size_t k_folds = 5;
  std::uint64_t seed = 0;
};

struct AwaySection {
  std::string label;
  std::string distance_note;
  DataConfig data;
};

struct CompareEntry {
  std::string name;
  std::optional<std::filesystem::path> model_path;  // saved model, or
  std::optional<LearnerSpec> learner;               // trained on the split
};

struct PipelineConfig {
  DataConfig data;
  SplitConfig split;
  LearnerSpec learner;
  bool selection_for_all = false;  // otherwise PCC selection only feeds the MLP
  std::optional<TuneSection> tune;
  CurveSection curve;
  std::string home_label = "home";
  std::vector<AwaySection> away;
  std::vector<CompareEntry> compare;
  std::filesystem::path output_dir = "helio_out";
  nlohmann::json snapshot;  // the effective configuration document
};

// Parses and validates every section; throws Error (config class) on problems.
PipelineConfig parse_config(const nlohmann::json& doc);
// Applies "a.b.c=value" overrides; values are parsed as JSON when possible.
void apply_override(nlohmann::json& doc, const std::string& assignment);
nlohmann::json load_config_file(const std::filesystem::path& path);

TabularDataset load_data(const DataConfig& cfg);
// The learner spec with the config's selection policy applied.
LearnerSpec effective_learner(const PipelineConfig& cfg, LearnerSpec spec);

struct ArtifactEntry {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::vector<ArtifactEntry> artifacts;
  std::vector<std::pair<std::string, double>> timings_ms;

  nlohmann::json to_json() const;
};

std::string sha256_file(const std::filesystem::path& path);

struct CommandOptions {
  std::optional<std::filesystem::path> model_path;  // explain / transfer input model
  std::optional<std::size_t> max_rows;              // explain: cap on attributed rows
};

// Commands: run, tune, explain, curve, transfer, compare, synth. Each writes its
// report files into cfg.output_dir and finishes with manifest.json.
RunManifest run_command(const std::string& command, const PipelineConfig& cfg, const CommandOptions& options = {});

// Process exit code for an error: 2 config, 3 data, 4 training.
int exit_code_for(const Error& e) noexcept;

}  // namespace helio
