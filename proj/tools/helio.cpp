// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "helio/error.hpp"
#include "helio/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"helio: solar irradiance forecasting pipeline"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string model_path;
  std::string output_dir;
  std::size_t max_rows = 0;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"run", "ingest, split, train (or tune), evaluate and save the model"},
      {"tune", "Bayesian hyperparameter search with k-fold cross-validation"},
      {"explain", "tree SHAP attributions and importance summary"},
      {"curve", "learning curve over training-set fractions"},
      {"transfer", "score a model on displaced-location datasets"},
      {"compare", "comparison table over several models"},
      {"synth", "write the synthetic weather dataset as CSV"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "JSON configuration file");
    sub->add_option("-s,--set", overrides, "override a config field, dotted.path=value")->take_all();
    sub->add_option("-o,--out", output_dir, "output directory (overrides output_dir)");
    if (name == "explain" || name == "transfer") sub->add_option("-m,--model", model_path, "saved model JSON");
    if (name == "explain") sub->add_option("--max-rows", max_rows, "attribute at most this many test rows");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    nlohmann::json doc = config_path.empty() ? nlohmann::json::object() : helio::load_config_file(config_path);
    for (const auto& o : overrides) helio::apply_override(doc, o);
    if (!output_dir.empty()) doc["output_dir"] = output_dir;
    const auto cfg = helio::parse_config(doc);

    helio::CommandOptions opt;
    if (!model_path.empty()) opt.model_path = model_path;
    if (max_rows) opt.max_rows = max_rows;
    const auto manifest = helio::run_command(command, cfg, opt);
    for (const auto& a : manifest.artifacts) std::printf("%s  %s\n", a.sha256.c_str(), (cfg.output_dir / a.path).c_str());
    std::printf("manifest: %s\n", (cfg.output_dir / "manifest.json").c_str());
    return 0;
  } catch (const helio::Error& e) {
    std::fprintf(stderr, "helio %s: %s error [%s]: %s\n", command.c_str(),
                 helio::error_class(e.code()) == helio::ErrorClass::config
                     ? "config"
                     : (helio::error_class(e.code()) == helio::ErrorClass::data ? "data" : "training"),
                 std::string(helio::errc_name(e.code())).c_str(), e.what());
    return helio::exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "helio %s: %s\n", command.c_str(), e.what());
    return 1;
  }
}
