// SPDX-License-Identifier: Apache-2.0
#include "helio/pipeline.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "helio/error.hpp"
#include "helio/explain.hpp"
#include "helio/json_io.hpp"

namespace helio {

namespace {

using ojson = nlohmann::json;

void require_object(const ojson& j, const std::string& what) {
  if (!j.is_object()) fail(Errc::InvalidConfig, what + " must be a JSON object");
}

void check_keys(const ojson& j, const std::string& what, std::initializer_list<const char*> allowed) {
  require_object(j, what);
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) fail(Errc::InvalidConfig, "unknown key '" + k + "' in " + what);
}

template <typename T>
T value_or(const ojson& j, const char* key, T fallback, const std::string& what) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const ojson::exception& e) {
    fail(Errc::InvalidConfig, what + "." + key + ": " + e.what());
  }
}

SynthCoefficients coefficients_from_json(const ojson& j, SynthCoefficients c) {
  check_keys(j, "data.coefficients", {"base", "temperature", "humidity", "wind_direction", "noise_sd"});
  c.base = value_or(j, "base", c.base, "data.coefficients");
  c.temperature = value_or(j, "temperature", c.temperature, "data.coefficients");
  c.humidity = value_or(j, "humidity", c.humidity, "data.coefficients");
  c.wind_direction = value_or(j, "wind_direction", c.wind_direction, "data.coefficients");
  c.noise_sd = value_or(j, "noise_sd", c.noise_sd, "data.coefficients");
  if (!(c.noise_sd >= 0.0)) fail(Errc::InvalidConfig, "data.coefficients.noise_sd must be >= 0");
  return c;
}

DataConfig data_from_json(const ojson& j) {
  check_keys(j, "data", {"source", "n", "seed", "coefficients", "path", "mapping", "clean", "cyclic", "noise_features",
                         "noise_seed"});
  DataConfig d;
  const auto source = value_or<std::string>(j, "source", "synthetic", "data");
  if (source == "synthetic") d.source = DataConfig::Source::synthetic;
  else if (source == "csv") d.source = DataConfig::Source::csv;
  else fail(Errc::InvalidConfig, "data.source must be 'synthetic' or 'csv'");
  d.n = value_or<std::size_t>(j, "n", d.n, "data");
  d.seed = value_or<std::uint64_t>(j, "seed", d.seed, "data");
  if (j.contains("coefficients")) d.coefficients = coefficients_from_json(j.at("coefficients"), d.coefficients);
  d.path = value_or<std::string>(j, "path", "", "data");
  d.mapping = value_or<ColumnMapping>(j, "mapping", {}, "data");
  const auto clean = value_or<std::string>(j, "clean", "drop_row", "data");
  if (clean == "drop_row") d.clean = CleanPolicy::drop_row;
  else if (clean == "fail") d.clean = CleanPolicy::fail;
  else fail(Errc::InvalidConfig, "data.clean must be 'drop_row' or 'fail'");
  d.cyclic = value_or<std::vector<std::string>>(j, "cyclic", {}, "data");
  d.noise_features = value_or<std::size_t>(j, "noise_features", 0, "data");
  d.noise_seed = value_or<std::uint64_t>(j, "noise_seed", 0, "data");
  if (d.source == DataConfig::Source::synthetic && d.n < 24) fail(Errc::InvalidConfig, "data.n must be >= 24");
  if (d.source == DataConfig::Source::csv && d.path.empty()) fail(Errc::InvalidConfig, "data.path is required for csv data");
  return d;
}

std::optional<SelectionRule> selection_from_json(const ojson& j, bool& for_all) {
  if (j.is_null()) return std::nullopt;
  check_keys(j, "selection", {"rule", "k", "t", "apply_to"});
  const auto apply = value_or<std::string>(j, "apply_to", "mlp", "selection");
  if (apply != "mlp" && apply != "all") fail(Errc::InvalidConfig, "selection.apply_to must be 'mlp' or 'all'");
  for_all = apply == "all";
  const auto rule = value_or<std::string>(j, "rule", "top_k", "selection");
  if (rule == "top_k") {
    const auto k = value_or<long long>(j, "k", 5, "selection");
    if (k < 1) fail(Errc::InvalidConfig, "selection.k must be >= 1");
    return TopKRule{static_cast<std::size_t>(k)};
  }
  if (rule == "threshold") {
    const double t = value_or(j, "t", 0.5, "selection");
    if (!(t >= 0.0 && t <= 1.0)) fail(Errc::InvalidConfig, "selection.t must lie in [0, 1]");
    return ThresholdRule{t};
  }
  fail(Errc::InvalidConfig, "selection.rule must be 'top_k' or 'threshold'");
}

LearnerSpec learner_from_json(const ojson& j, const std::string& what) {
  check_keys(j, what, {"kind", "forest", "boosted", "mlp", "hidden", "standardize_inputs"});
  LearnerSpec s;
  s.kind = parse_learner(value_or<std::string>(j, "kind", "forest", what));
  if (j.contains("forest")) s.forest = forest_config_from_json(j.at("forest"));
  if (j.contains("boosted")) s.boosted = boost_config_from_json(j.at("boosted"));
  if (j.contains("mlp")) s.mlp = mlp_config_from_json(j.at("mlp"));
  s.hidden = value_or(j, "hidden", s.hidden, what);
  s.standardize_inputs = value_or(j, "standardize_inputs", false, what);
  s.validate();
  return s;
}

ojson learner_to_json(const LearnerSpec& s) {
  ojson j;
  j["kind"] = std::string(learner_name(s.kind));
  j["forest"] = to_json(s.forest);
  j["boosted"] = to_json(s.boosted);
  j["mlp"] = to_json(s.mlp);
  j["hidden"] = s.hidden;
  j["standardize_inputs"] = s.standardize_inputs;
  return j;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Stopwatch {
 public:
  explicit Stopwatch(RunManifest& m) : manifest_(m) {}
  template <class F>
  auto stage(const std::string& name, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    auto finish = [&] {
      const auto dt = std::chrono::steady_clock::now() - t0;
      manifest_.timings_ms.emplace_back(name, std::chrono::duration<double, std::milli>(dt).count());
    };
    try {
      if constexpr (std::is_void_v<decltype(body())>) {
        body();
        finish();
      } else {
        auto r = body();
        finish();
        return r;
      }
    } catch (const Error& e) {
      throw e.with_context("stage " + name);
    }
  }

 private:
  RunManifest& manifest_;
};

struct Outputs {
  std::filesystem::path dir;
  RunManifest& manifest;

  std::filesystem::path file(const std::string& name) {
    manifest.artifacts.push_back({name, "", 0});
    return dir / name;
  }
  void write_text(const std::string& name, const std::string& text) {
    std::ofstream out(file(name), std::ios::binary);
    if (!out) fail(Errc::Io, "cannot write '" + (dir / name).string() + "'");
    out << text;
  }
};

struct Prepared {
  TabularDataset ds;
  SplitIndices split;
  TabularDataset train;
  TabularDataset test;
};

Prepared prepare(const PipelineConfig& cfg, Stopwatch& sw) {
  Prepared p;
  p.ds = sw.stage("ingest", [&] { return load_data(cfg.data); });
  sw.stage("split", [&] {
    p.split = split_train_test(p.ds, cfg.split.train_fraction, cfg.split.seed, cfg.split.shuffle);
    p.train = p.ds.subset(p.split.train);
    p.test = p.ds.subset(p.split.test);
  });
  return p;
}

ModelBundle train_or_load(const PipelineConfig& cfg, const CommandOptions& opt, const TabularDataset& train, Stopwatch& sw) {
  if (opt.model_path) return sw.stage("load_model", [&] { return load_model(*opt.model_path); });
  return sw.stage("train", [&] { return fit_learner(effective_learner(cfg, cfg.learner), train); });
}

ojson metrics_json(const std::string& name, const MetricsReport& m) {
  auto j = to_json(m);
  j["model"] = name;
  return j;
}

}  // namespace

nlohmann::json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::InvalidConfig, "cannot open config '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::InvalidConfig, "config '" + path.string() + "': " + e.what());
  }
}

void apply_override(nlohmann::json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) fail(Errc::InvalidConfig, "override must look like a.b.c=value: '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception&) {
    value = text;
  }
  if (!doc.is_object()) doc = nlohmann::json::object();
  nlohmann::json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) fail(Errc::InvalidConfig, "empty path segment in override '" + assignment + "'");
    if (dot == std::string::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    auto& next = (*node)[key];
    if (!next.is_object()) next = nlohmann::json::object();
    node = &next;
    start = dot + 1;
  }
}

PipelineConfig parse_config(const nlohmann::json& doc) {
  check_keys(doc, "config", {"data", "split", "selection", "learner", "tune", "curve", "transfer", "compare", "output_dir"});
  PipelineConfig c;
  c.snapshot = doc;
  const ojson empty = ojson::object();
  const ojson& data = doc.contains("data") ? doc.at("data") : empty;
  c.data = data_from_json(data);

  if (doc.contains("split")) {
    const auto& s = doc.at("split");
    check_keys(s, "split", {"train_fraction", "seed", "shuffle"});
    c.split.train_fraction = value_or(s, "train_fraction", c.split.train_fraction, "split");
    c.split.seed = value_or<std::uint64_t>(s, "seed", c.split.seed, "split");
    c.split.shuffle = value_or(s, "shuffle", c.split.shuffle, "split");
  }
  if (!(c.split.train_fraction > 0.0 && c.split.train_fraction < 1.0))
    fail(Errc::InvalidConfig, "split.train_fraction must lie in (0, 1), got " + num(c.split.train_fraction));

  c.learner = learner_from_json(doc.contains("learner") ? doc.at("learner") : empty, "learner");
  if (doc.contains("selection")) c.learner.selection = selection_from_json(doc.at("selection"), c.selection_for_all);

  if (doc.contains("tune") && !doc.at("tune").is_null()) {
    const auto& t = doc.at("tune");
    check_keys(t, "tune", {"space", "n_initial", "n_iterations", "k_folds", "seed"});
    TuneSection ts;
    if (!t.contains("space") || (t.at("space").is_string() && t.at("space").get<std::string>() == "default"))
      ts.space = default_space(c.learner.kind);
    else
      ts.space = param_space_from_json(t.at("space"));
    ts.tuner.n_initial = value_or<std::size_t>(t, "n_initial", ts.tuner.n_initial, "tune");
    ts.tuner.n_iterations = value_or<std::size_t>(t, "n_iterations", ts.tuner.n_iterations, "tune");
    ts.tuner.k_folds = value_or<std::size_t>(t, "k_folds", ts.tuner.k_folds, "tune");
    ts.tuner.seed = value_or<std::uint64_t>(t, "seed", ts.tuner.seed, "tune");
    ts.tuner.validate();
    ts.space.validate();
    if (ts.space.dims.empty()) fail(Errc::InvalidConfig, "tune.space is empty");
    // Every dimension must name a hyperparameter of the learner.
    apply_params(c.learner, decode(std::vector<double>(ts.space.size(), 0.5), ts.space));
    c.tune = std::move(ts);
  }

  if (doc.contains("curve")) {
    const auto& cv = doc.at("curve");
    check_keys(cv, "curve", {"fractions", "k_folds", "seed"});
    c.curve.fractions = value_or(cv, "fractions", c.curve.fractions, "curve");
    c.curve.k_folds = value_or<std::size_t>(cv, "k_folds", c.curve.k_folds, "curve");
    c.curve.seed = value_or<std::uint64_t>(cv, "seed", c.curve.seed, "curve");
  }
  if (c.curve.k_folds < 2) fail(Errc::BadK, "curve.k_folds must be >= 2");
  for (std::size_t i = 0; i < c.curve.fractions.size(); ++i) {
    const double f = c.curve.fractions[i];
    if (!(f > 0.0 && f <= 1.0) || (i && !(f > c.curve.fractions[i - 1])))
      fail(Errc::InvalidConfig, "curve.fractions must be strictly ascending in (0, 1]");
  }

  if (doc.contains("transfer")) {
    const auto& t = doc.at("transfer");
    check_keys(t, "transfer", {"home_label", "away"});
    c.home_label = value_or<std::string>(t, "home_label", c.home_label, "transfer");
    if (t.contains("away")) {
      if (!t.at("away").is_array()) fail(Errc::InvalidConfig, "transfer.away must be an array");
      for (const auto& a : t.at("away")) {
        check_keys(a, "transfer.away[]", {"label", "distance_note", "data"});
        AwaySection s;
        s.label = value_or<std::string>(a, "label", "", "transfer.away[]");
        if (s.label.empty()) fail(Errc::InvalidConfig, "transfer.away[] needs a label");
        s.distance_note = value_or<std::string>(a, "distance_note", "", "transfer.away[]");
        ojson merged = data;
        if (a.contains("data")) merged.merge_patch(a.at("data"));
        s.data = data_from_json(merged);
        c.away.push_back(std::move(s));
      }
    }
  }

  if (doc.contains("compare")) {
    const auto& cmp = doc.at("compare");
    if (!cmp.is_array()) fail(Errc::InvalidConfig, "compare must be an array");
    std::set<std::string> names;
    for (const auto& e : cmp) {
      check_keys(e, "compare[]", {"name", "model", "learner", "selection"});
      CompareEntry ce;
      ce.name = value_or<std::string>(e, "name", "", "compare[]");
      if (ce.name.empty() || !names.insert(ce.name).second)
        fail(Errc::InvalidConfig, "compare entries need unique names");
      if (e.contains("model")) ce.model_path = e.at("model").get<std::string>();
      if (e.contains("learner")) {
        ce.learner = learner_from_json(e.at("learner"), "compare[].learner");
        if (e.contains("selection")) {
          bool unused = false;
          ce.learner->selection = selection_from_json(e.at("selection"), unused);
        }
      }
      if (ce.model_path.has_value() == ce.learner.has_value())
        fail(Errc::InvalidConfig, "compare entry '" + ce.name + "' needs exactly one of model or learner");
      c.compare.push_back(std::move(ce));
    }
  }

  c.output_dir = value_or<std::string>(doc, "output_dir", c.output_dir.string(), "config");
  return c;
}

TabularDataset load_data(const DataConfig& cfg) {
  TabularDataset ds;
  if (cfg.source == DataConfig::Source::synthetic) {
    ds = synth_generate(cfg.n, cfg.seed, cfg.coefficients);
  } else {
    ds = clean(load_csv(cfg.path, weather_schema(), cfg.mapping), cfg.clean);
  }
  for (const auto& col : cfg.cyclic) ds = encode_cyclic(ds, col);
  if (cfg.noise_features) ds = add_noise_features(ds, cfg.noise_features, cfg.noise_seed);
  return ds;
}

LearnerSpec effective_learner(const PipelineConfig& cfg, LearnerSpec spec) {
  if (!cfg.selection_for_all && spec.kind != LearnerKind::mlp) spec.selection.reset();
  return spec;
}

nlohmann::json RunManifest::to_json() const {
  ojson j;
  j["command"] = command;
  j["config"] = config;
  auto arts = ojson::array();
  for (const auto& a : artifacts) arts.push_back({{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
  j["artifacts"] = std::move(arts);
  auto t = ojson::array();
  for (const auto& [name, ms] : timings_ms) t.push_back({{"stage", name}, {"ms", ms}});
  j["timings_ms"] = std::move(t);
  return j;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::Io, "cannot hash '" + path.string() + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char b[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(b, sizeof b, "%02x", md[i]);
    hex += b;
  }
  return hex;
}

int exit_code_for(const Error& e) noexcept { return static_cast<int>(error_class(e.code())); }

RunManifest run_command(const std::string& command, const PipelineConfig& cfg, const CommandOptions& opt) {
  static const std::set<std::string> known{"run", "tune", "explain", "curve", "transfer", "compare", "synth"};
  if (!known.count(command)) fail(Errc::InvalidConfig, "unknown command '" + command + "'");
  if (command == "tune" && !cfg.tune) fail(Errc::InvalidConfig, "the tune command needs a 'tune' section");

  RunManifest manifest;
  manifest.command = command;
  manifest.config = cfg.snapshot;
  Stopwatch sw(manifest);
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) fail(Errc::Io, "cannot create output directory '" + cfg.output_dir.string() + "': " + ec.message());
  Outputs out{cfg.output_dir, manifest};

  if (command == "synth") {
    const auto ds = sw.stage("ingest", [&] { return load_data(cfg.data); });
    sw.stage("emit", [&] { write_csv(out.file("data.csv"), ds); });
  } else if (command == "run") {
    auto p = prepare(cfg, sw);
    sw.stage("correlation", [&] { write_correlation_csv(out.file("pcc.csv"), correlation_report(p.train)); });
    LearnerSpec spec = effective_learner(cfg, cfg.learner);
    if (cfg.tune) {
      const auto result = sw.stage("tune", [&] {
        return tune(make_trainer(spec), p.train, cfg.tune->space, cfg.tune->tuner);
      });
      write_trials_jsonl(out.file("trials.jsonl"), result.history);
      spec = apply_params(spec, result.best.params);
    }
    const auto bundle = sw.stage("train", [&] { return fit_learner(spec, p.train); });
    sw.stage("emit_model", [&] { save_model(out.file("model.json"), bundle); });
    const auto m = sw.stage("evaluate", [&] { return evaluate(bundle, p.test); });
    sw.stage("emit_reports", [&] {
      ComparisonTable table = make_table({{std::string(learner_name(spec.kind)), m}});
      write_comparison_csv(out.file("metrics.csv"), table);
      ojson j;
      j["metrics"] = metrics_json(std::string(learner_name(spec.kind)), m);
      j["learner"] = learner_to_json(spec);
      j["config"] = cfg.snapshot;
      out.write_text("metrics.json", j.dump(2) + "\n");
    });
  } else if (command == "tune") {
    auto p = prepare(cfg, sw);
    const LearnerSpec spec = effective_learner(cfg, cfg.learner);
    const auto result = sw.stage("tune", [&] { return tune(make_trainer(spec), p.train, cfg.tune->space, cfg.tune->tuner); });
    sw.stage("emit", [&] {
      write_trials_jsonl(out.file("trials.jsonl"), result.history);
      ojson j;
      j["best"] = to_json(result.best);
      j["space"] = to_json(cfg.tune->space);
      j["learner"] = learner_to_json(apply_params(spec, result.best.params));
      j["config"] = cfg.snapshot;
      out.write_text("best.json", j.dump(2) + "\n");
    });
  } else if (command == "explain") {
    auto p = prepare(cfg, sw);
    const auto bundle = train_or_load(cfg, opt, p.train, sw);
    if (!is_tree_model(bundle.model)) fail(Errc::NotATreeModel, "explain needs a forest or boosted model, got mlp");
    TabularDataset rows = p.test;
    if (opt.max_rows && *opt.max_rows < rows.row_count()) {
      std::vector<std::size_t> keep(*opt.max_rows);
      for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
      rows = rows.subset(keep);
    }
    const Matrix values = bundle.prepare(rows);
    const auto attr = sw.stage("attribute", [&] { return tree_shap(bundle, rows); });
    sw.stage("emit", [&] {
      write_attribution_csv(out.file("shap_values.csv"), attr, values);
      write_summary_csv(out.file("shap_summary.csv"), importance_summary(attr, values));
    });
  } else if (command == "curve") {
    auto p = prepare(cfg, sw);
    const auto curve = sw.stage("curve", [&] {
      const auto folds = make_folds(p.train.row_count(), cfg.curve.k_folds, cfg.curve.seed);
      return learning_curve(make_fit_fn(effective_learner(cfg, cfg.learner)), p.train, cfg.curve.fractions, folds,
                            cfg.curve.seed);
    });
    sw.stage("emit", [&] { write_curve_csv(out.file("learning_curve.csv"), curve); });
  } else if (command == "transfer") {
    auto p = prepare(cfg, sw);
    const auto bundle = train_or_load(cfg, opt, p.train, sw);
    std::vector<LabeledDataset> away;
    sw.stage("ingest_away", [&] {
      for (const auto& a : cfg.away) away.push_back({a.label, a.distance_note, load_data(a.data)});
    });
    const auto report = sw.stage("evaluate", [&] {
      return transfer_test(bundle, {cfg.home_label, "", p.ds}, p.split, away);
    });
    sw.stage("emit", [&] {
      write_transfer_csv(out.file("transfer.csv"), report);
      auto j = to_json(report);
      j["config"] = cfg.snapshot;
      out.write_text("transfer.json", j.dump(2) + "\n");
    });
  } else if (command == "compare") {
    auto p = prepare(cfg, sw);
    std::vector<CompareEntry> entries = cfg.compare;
    if (entries.empty()) {
      // Default line-up: each learner kind, the MLP with and without PCC selection.
      LearnerSpec base = cfg.learner;
      auto with = [&](LearnerKind k) {
        LearnerSpec s = base;
        s.kind = k;
        s.selection.reset();
        return s;
      };
      entries.push_back({"forest", std::nullopt, with(LearnerKind::forest)});
      LearnerSpec first = with(LearnerKind::boosted);
      first.boosted.order = BoostOrder::first;
      entries.push_back({"boosted_first_order", std::nullopt, first});
      entries.push_back({"boosted_second_order", std::nullopt, with(LearnerKind::boosted)});
      LearnerSpec sym = with(LearnerKind::boosted);
      sym.boosted.tree_shape = TreeShape::symmetric;
      entries.push_back({"boosted_symmetric", std::nullopt, sym});
      entries.push_back({"mlp", std::nullopt, with(LearnerKind::mlp)});
      LearnerSpec pcc = with(LearnerKind::mlp);
      pcc.selection = cfg.learner.selection ? cfg.learner.selection : SelectionRule{TopKRule{5}};
      entries.push_back({"mlp_pcc", std::nullopt, pcc});
    }
    std::vector<ModelBundle> bundles;
    bundles.reserve(entries.size());
    for (const auto& e : entries) {
      bundles.push_back(sw.stage("model " + e.name, [&] {
        return e.model_path ? load_model(*e.model_path) : fit_learner(*e.learner, p.train);
      }));
    }
    std::vector<NamedModel> named;
    for (std::size_t i = 0; i < entries.size(); ++i) named.push_back({entries[i].name, &bundles[i]});
    const auto table = sw.stage("evaluate", [&] { return compare(named, p.ds, p.split); });
    sw.stage("emit", [&] {
      write_comparison_csv(out.file("comparison.csv"), table);
      auto j = to_json(table);
      j["config"] = cfg.snapshot;
      out.write_text("comparison.json", j.dump(2) + "\n");
    });
  }

  for (auto& a : manifest.artifacts) {
    const auto path = cfg.output_dir / a.path;
    a.sha256 = sha256_file(path);
    a.bytes = std::filesystem::file_size(path);
  }
  std::ofstream mf(cfg.output_dir / "manifest.json", std::ios::binary);
  if (!mf) fail(Errc::Io, "cannot write manifest");
  mf << manifest.to_json().dump(2) << '\n';
  return manifest;
}

}  // namespace helio
