// SPDX-License-Identifier: Apache-2.0
#include "helio/json_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>

#include "helio/error.hpp"

namespace helio {

std::string hexfloat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_real_text(std::string_view text) {
  const std::string s(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) fail(Errc::ParseError, "not a real number: '" + s + "'");
  return v;
}

double real_from_json(const json& j) {
  if (j.is_string()) return parse_real_text(j.get<std::string>());
  if (j.is_number()) return j.get<double>();
  fail(Errc::ParseError, "expected a real number, got " + j.dump());
}

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(Errc::InvalidConfig, std::string("config key '") + key + "': " + e.what());
  }
}

std::size_t get_count(const json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    fail(Errc::InvalidConfig, std::string("config key '") + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

void require_object(const json& j, const char* what) {
  if (!j.is_object()) fail(Errc::InvalidConfig, std::string(what) + " must be a JSON object");
}

}  // namespace

json to_json(const ForestConfig& c) {
  json j;
  j["n_estimators"] = c.n_estimators;
  j["max_depth"] = c.max_depth ? json(*c.max_depth) : json(nullptr);
  j["min_impurity_decrease"] = c.min_impurity_decrease;
  j["bootstrap"] = c.bootstrap;
  switch (c.max_features.kind) {
    case MaxFeatures::Kind::all: j["max_features"] = "all"; break;
    case MaxFeatures::Kind::sqrt: j["max_features"] = "sqrt"; break;
    case MaxFeatures::Kind::fraction: j["max_features"] = c.max_features.fraction; break;
  }
  j["min_leaf"] = c.min_leaf;
  j["seed"] = c.seed;
  return j;
}

ForestConfig forest_config_from_json(const json& j, ForestConfig c) {
  require_object(j, "forest config");
  c.n_estimators = get_count(j, "n_estimators", c.n_estimators);
  if (j.contains("max_depth")) {
    const auto& d = j.at("max_depth");
    if (d.is_null() || (d.is_string() && d.get<std::string>() == "none")) c.max_depth.reset();
    else c.max_depth = get_count(j, "max_depth", 0);
  }
  c.min_impurity_decrease = get_or(j, "min_impurity_decrease", c.min_impurity_decrease);
  c.bootstrap = get_or(j, "bootstrap", c.bootstrap);
  if (j.contains("max_features")) {
    const auto& m = j.at("max_features");
    if (m.is_string()) {
      const auto s = m.get<std::string>();
      // "auto" means every feature for regression.
      if (s == "all" || s == "auto") c.max_features = {MaxFeatures::Kind::all, 1.0};
      else if (s == "sqrt") c.max_features = {MaxFeatures::Kind::sqrt, 1.0};
      else fail(Errc::InvalidConfig, "max_features must be all, auto, sqrt or a fraction");
    } else if (m.is_number()) {
      c.max_features = {MaxFeatures::Kind::fraction, m.get<double>()};
    } else {
      fail(Errc::InvalidConfig, "max_features must be all, auto, sqrt or a fraction");
    }
  }
  c.min_leaf = get_count(j, "min_leaf", c.min_leaf);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.validate();
  return c;
}

json to_json(const BoostConfig& c) {
  json j;
  j["n_rounds"] = c.n_rounds;
  j["learning_rate"] = c.learning_rate;
  j["max_depth"] = c.max_depth;
  j["order"] = c.order == BoostOrder::first ? "first" : "second";
  j["tree_shape"] = c.tree_shape == TreeShape::free ? "free" : "symmetric";
  j["n_bins"] = c.n_bins;
  j["l2_leaf"] = c.l2_leaf;
  j["seed"] = c.seed;
  return j;
}

BoostConfig boost_config_from_json(const json& j, BoostConfig c) {
  require_object(j, "boosted config");
  c.n_rounds = get_count(j, "n_rounds", c.n_rounds);
  c.learning_rate = get_or(j, "learning_rate", c.learning_rate);
  c.max_depth = get_count(j, "max_depth", c.max_depth);
  if (j.contains("order")) {
    const auto s = get_or<std::string>(j, "order", "second");
    if (s == "first") c.order = BoostOrder::first;
    else if (s == "second") c.order = BoostOrder::second;
    else fail(Errc::InvalidConfig, "order must be first or second");
  }
  if (j.contains("tree_shape")) {
    const auto s = get_or<std::string>(j, "tree_shape", "free");
    if (s == "free") c.tree_shape = TreeShape::free;
    else if (s == "symmetric") c.tree_shape = TreeShape::symmetric;
    else fail(Errc::InvalidConfig, "tree_shape must be free or symmetric");
  }
  c.n_bins = get_count(j, "n_bins", c.n_bins);
  c.l2_leaf = get_or(j, "l2_leaf", c.l2_leaf);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.validate();
  return c;
}

json to_json(const MlpTrainConfig& c) {
  json j;
  j["learning_rate"] = c.learning_rate;
  j["alpha_l2"] = c.alpha_l2;
  j["max_iter"] = c.max_iter;
  j["batch_size"] = c.batch_size ? json(*c.batch_size) : json("auto");
  j["shuffle"] = c.shuffle;
  j["seed"] = c.seed;
  j["tol"] = c.tol;
  j["patience"] = c.patience;
  j["beta1"] = c.beta1;
  j["beta2"] = c.beta2;
  j["epsilon"] = c.epsilon;
  return j;
}

MlpTrainConfig mlp_config_from_json(const json& j, MlpTrainConfig c) {
  require_object(j, "mlp config");
  c.learning_rate = get_or(j, "learning_rate", c.learning_rate);
  c.alpha_l2 = get_or(j, "alpha_l2", c.alpha_l2);
  c.max_iter = get_count(j, "max_iter", c.max_iter);
  if (j.contains("batch_size")) {
    const auto& b = j.at("batch_size");
    if (b.is_string() && b.get<std::string>() == "auto") c.batch_size.reset();
    else c.batch_size = get_count(j, "batch_size", 200);
  }
  c.shuffle = get_or(j, "shuffle", c.shuffle);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.tol = get_or(j, "tol", c.tol);
  c.patience = get_count(j, "patience", c.patience);
  c.beta1 = get_or(j, "beta1", c.beta1);
  c.beta2 = get_or(j, "beta2", c.beta2);
  c.epsilon = get_or(j, "epsilon", c.epsilon);
  c.validate();
  return c;
}

json to_json(const StandardizationParams& p) {
  json j;
  j["names"] = p.names;
  json mean = json::array(), sd = json::array();
  for (double v : p.mean) mean.push_back(hexfloat(v));
  for (double v : p.stddev) sd.push_back(hexfloat(v));
  j["mean"] = std::move(mean);
  j["stddev"] = std::move(sd);
  return j;
}

StandardizationParams standardization_from_json(const json& j) {
  StandardizationParams p;
  p.names = j.at("names").get<std::vector<std::string>>();
  for (const auto& v : j.at("mean")) p.mean.push_back(real_from_json(v));
  for (const auto& v : j.at("stddev")) p.stddev.push_back(real_from_json(v));
  if (p.names.size() != p.mean.size() || p.mean.size() != p.stddev.size())
    fail(Errc::ParseError, "standardizer arrays differ in length");
  return p;
}

}  // namespace helio
