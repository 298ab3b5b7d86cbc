// SPDX-License-Identifier: Apache-2.0
#include "helio/model.hpp"

#include <fstream>
#include <sstream>

#include "helio/error.hpp"
#include "helio/json_io.hpp"

namespace helio {

std::string_view model_kind(const TrainedModel& model) noexcept {
  switch (model.index()) {
    case 0: return "forest";
    case 1: return "boosted";
    default: return "mlp";
  }
}

bool is_tree_model(const TrainedModel& model) noexcept { return !std::holds_alternative<MlpModel>(model); }

std::vector<double> predict(const TrainedModel& model, const Matrix& x) {
  return std::visit(
      [&](const auto& m) -> std::vector<double> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ForestModel>) return predict_forest(m, x);
        else if constexpr (std::is_same_v<T, BoostedModel>) return predict_boosted(m, x);
        else return predict_mlp(m, x);
      },
      model);
}

Matrix ModelBundle::prepare(const TabularDataset& ds) const {
  std::vector<std::size_t> idx;
  idx.reserve(feature_names.size());
  for (const auto& name : feature_names) {
    const auto j = ds.feature_index(name);
    if (!j) throw Error(Errc::SchemaMismatch, "dataset lacks model feature '" + name + "'");
    idx.push_back(*j);
  }
  Matrix x = ds.rows.select_cols(idx);
  if (input_scaling) {
    const auto& p = *input_scaling;
    if (p.size() != x.cols()) fail(Errc::SchemaMismatch, "standardizer width differs from model features");
    for (std::size_t r = 0; r < x.rows(); ++r)
      for (std::size_t c = 0; c < x.cols(); ++c) x(r, c) = (x(r, c) - p.mean[c]) / p.stddev[c];
  }
  return x;
}

std::vector<double> ModelBundle::predict(const TabularDataset& ds) const { return helio::predict(model, prepare(ds)); }

namespace {

using ojson = nlohmann::ordered_json;

void write_node(std::string& out, const Tree& tree, std::size_t i) {
  const auto& n = tree.nodes[i];
  if (n.is_leaf()) {
    out += "{\"value\":\"";
    out += hexfloat(n.value);
    out += "\",\"n_samples\":";
    out += std::to_string(n.n_samples);
    out += '}';
    return;
  }
  out += "{\"feature_index\":";
  out += std::to_string(n.feature);
  out += ",\"threshold\":\"";
  out += hexfloat(n.threshold);
  out += "\",\"left\":";
  write_node(out, tree, static_cast<std::size_t>(n.left));
  out += ",\"right\":";
  write_node(out, tree, static_cast<std::size_t>(n.right));
  out += '}';
}

std::string with_trees(const ojson& head, const std::vector<Tree>& trees) {
  std::string out = head.dump();
  out.pop_back();  // closing brace
  out += ",\"trees\":[";
  for (std::size_t t = 0; t < trees.size(); ++t) {
    out += t ? ",\n" : "\n";
    write_node(out, trees[t], 0);
  }
  out += "\n]}\n";
  return out;
}

ojson as_ordered(const json& j) { return ojson::parse(j.dump()); }

// Streaming reader: generic DOM for everything except the top-level "trees"
// array, whose nested nodes are decoded straight into flat Tree arrays.
class ModelSax {
 public:
  json root;
  std::vector<Tree> trees;

  bool null() { return add(json(nullptr)); }
  bool boolean(bool v) { return add(json(v)); }
  bool number_integer(json::number_integer_t v) { return in_tree_ ? tree_int(v) : add(json(v)); }
  bool number_unsigned(json::number_unsigned_t v) {
    return in_tree_ ? tree_int(static_cast<std::int64_t>(v)) : add(json(v));
  }
  bool number_float(json::number_float_t v, const std::string&) { return in_tree_ ? tree_real(v) : add(json(v)); }
  bool string(std::string& v) { return in_tree_ ? tree_real(parse_real_text(v)) : add(json(v)); }
  bool binary(json::binary_t&) { return false; }

  bool start_object(std::size_t) {
    if (in_tree_) return tree_open();
    return open(json::object());
  }
  bool end_object() {
    if (in_tree_) {
      nodes_.pop_back();
      return true;
    }
    stack_.pop_back();
    return true;
  }
  bool start_array(std::size_t) {
    if (!in_tree_ && stack_.size() == 1 && key_ == "trees") {
      in_tree_ = true;
      return true;
    }
    if (in_tree_) return false;
    return open(json::array());
  }
  bool end_array() {
    if (in_tree_ && nodes_.empty()) {
      in_tree_ = false;
      return true;
    }
    stack_.pop_back();
    return true;
  }
  bool key(std::string& k) {
    key_ = k;
    return true;
  }
  bool parse_error(std::size_t pos, const std::string&, const nlohmann::detail::exception& e) {
    fail(Errc::ParseError, "model JSON at byte " + std::to_string(pos) + ": " + e.what());
  }

 private:
  bool add(json v) {
    if (in_tree_) return false;
    if (stack_.empty()) {
      root = std::move(v);
    } else if (stack_.back()->is_object()) {
      (*stack_.back())[key_] = std::move(v);
    } else {
      stack_.back()->push_back(std::move(v));
    }
    return true;
  }
  bool open(json v) {
    if (stack_.empty()) {
      root = std::move(v);
      stack_.push_back(&root);
      return true;
    }
    json* parent = stack_.back();
    if (parent->is_object()) {
      (*parent)[key_] = std::move(v);
      stack_.push_back(&(*parent)[key_]);
    } else {
      parent->push_back(std::move(v));
      stack_.push_back(&parent->back());
    }
    return true;
  }

  bool tree_open() {
    if (nodes_.empty()) {
      trees.emplace_back();
    } else if (key_ != "left" && key_ != "right") {
      fail(Errc::ParseError, "unexpected object under tree key '" + key_ + "'");
    }
    auto& tree = trees.back();
    const auto id = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (!nodes_.empty()) {
      auto& parent = tree.nodes[static_cast<std::size_t>(nodes_.back())];
      (key_ == "left" ? parent.left : parent.right) = id;
    }
    nodes_.push_back(id);
    return true;
  }
  TreeNode& current() { return trees.back().nodes[static_cast<std::size_t>(nodes_.back())]; }
  bool tree_int(std::int64_t v) {
    if (nodes_.empty()) return false;
    if (key_ == "feature_index") current().feature = static_cast<std::int32_t>(v);
    else if (key_ == "n_samples") current().n_samples = v;
    else return tree_real(static_cast<double>(v));
    return true;
  }
  bool tree_real(double v) {
    if (nodes_.empty()) return false;
    if (key_ == "threshold") current().threshold = v;
    else if (key_ == "value") current().value = v;
    else fail(Errc::ParseError, "unexpected tree key '" + key_ + "'");
    return true;
  }

  std::vector<json*> stack_;
  std::string key_;
  bool in_tree_ = false;
  std::vector<std::int32_t> nodes_;
};

void check_tree(const Tree& tree) {
  for (const auto& n : tree.nodes) {
    if (n.is_leaf()) continue;
    if (n.left < 0 || n.right < 0) fail(Errc::ParseError, "internal tree node without two children");
    if (static_cast<std::size_t>(n.feature) >= tree.feature_count)
      fail(Errc::ParseError, "tree node references feature " + std::to_string(n.feature));
  }
}

std::vector<double> reals(const json& arr) {
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& v : arr) out.push_back(real_from_json(v));
  return out;
}

}  // namespace

std::string model_to_json(const ModelBundle& bundle) {
  ojson head;
  head["format"] = "helio-model";
  head["version"] = 1;
  head["kind"] = std::string(model_kind(bundle.model));
  head["feature_names"] = bundle.feature_names;
  head["input_scaling"] = bundle.input_scaling ? as_ordered(to_json(*bundle.input_scaling)) : ojson(nullptr);

  if (const auto* f = std::get_if<ForestModel>(&bundle.model)) {
    head["config"] = as_ordered(to_json(f->config));
    head["feature_count"] = f->feature_count;
    return with_trees(head, f->trees);
  }
  if (const auto* b = std::get_if<BoostedModel>(&bundle.model)) {
    head["config"] = as_ordered(to_json(b->config));
    head["feature_count"] = b->feature_count;
    head["base_score"] = hexfloat(b->base_score);
    return with_trees(head, b->trees);
  }
  const auto& m = std::get<MlpModel>(bundle.model);
  head["config"] = as_ordered(to_json(m.config));
  head["arch"] = m.arch.layer_sizes;
  ojson weights = ojson::array(), biases = ojson::array();
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    ojson w = ojson::array(), b = ojson::array();
    for (Eigen::Index r = 0; r < m.weights[l].rows(); ++r)
      for (Eigen::Index c = 0; c < m.weights[l].cols(); ++c) w.push_back(hexfloat(m.weights[l](r, c)));
    for (Eigen::Index r = 0; r < m.biases[l].size(); ++r) b.push_back(hexfloat(m.biases[l](r)));
    weights.push_back(std::move(w));
    biases.push_back(std::move(b));
  }
  head["weights"] = std::move(weights);
  head["biases"] = std::move(biases);
  head["target_mean"] = hexfloat(m.target_mean);
  head["target_scale"] = hexfloat(m.target_scale);
  ojson hist = ojson::array();
  for (double v : m.loss_history) hist.push_back(hexfloat(v));
  head["loss_history"] = std::move(hist);
  return head.dump() + "\n";
}

ModelBundle model_from_json(std::string_view text) {
  ModelBundle bundle;
  ModelSax sax;
  try {
    if (!json::sax_parse(text.begin(), text.end(), &sax)) fail(Errc::ParseError, "malformed model JSON");
  } catch (const json::exception& e) {
    fail(Errc::ParseError, std::string("model JSON: ") + e.what());
  }
  const json& j = sax.root;
  try {
    if (!j.is_object() || j.value("format", "") != "helio-model") fail(Errc::ParseError, "not a helio model document");
    const auto kind = j.at("kind").get<std::string>();
    bundle.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    if (!j.at("input_scaling").is_null()) bundle.input_scaling = standardization_from_json(j.at("input_scaling"));

    if (kind == "forest" || kind == "boosted") {
      const auto d = j.at("feature_count").get<std::size_t>();
      for (auto& t : sax.trees) {
        t.feature_count = d;
        check_tree(t);
        finalize_internal_nodes(t);
      }
      if (kind == "forest") {
        ForestModel f;
        f.config = forest_config_from_json(j.at("config"));
        f.feature_count = d;
        f.trees = std::move(sax.trees);
        bundle.model = std::move(f);
      } else {
        BoostedModel b;
        b.config = boost_config_from_json(j.at("config"));
        b.feature_count = d;
        b.base_score = real_from_json(j.at("base_score"));
        b.trees = std::move(sax.trees);
        bundle.model = std::move(b);
      }
    } else if (kind == "mlp") {
      MlpArchitecture arch{j.at("arch").get<std::vector<std::size_t>>()};
      arch.validate();
      MlpModel m;
      m.arch = arch;
      m.config = mlp_config_from_json(j.at("config"));
      const auto& ws = j.at("weights");
      const auto& bs = j.at("biases");
      const std::size_t layers = arch.layer_sizes.size() - 1;
      if (ws.size() != layers || bs.size() != layers) fail(Errc::ParseError, "layer count mismatch in mlp model");
      for (std::size_t l = 0; l < layers; ++l) {
        const auto rows = static_cast<Eigen::Index>(arch.layer_sizes[l + 1]);
        const auto cols = static_cast<Eigen::Index>(arch.layer_sizes[l]);
        const auto w = reals(ws[l]);
        const auto b = reals(bs[l]);
        if (w.size() != static_cast<std::size_t>(rows * cols) || b.size() != static_cast<std::size_t>(rows))
          fail(Errc::ParseError, "weight shape mismatch in layer " + std::to_string(l));
        Eigen::MatrixXd wm(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
          for (Eigen::Index c = 0; c < cols; ++c) wm(r, c) = w[static_cast<std::size_t>(r * cols + c)];
        m.weights.push_back(std::move(wm));
        m.biases.push_back(Eigen::Map<const Eigen::VectorXd>(b.data(), rows));
      }
      m.target_mean = real_from_json(j.at("target_mean"));
      m.target_scale = real_from_json(j.at("target_scale"));
      m.loss_history = reals(j.at("loss_history"));
      bundle.model = std::move(m);
    } else {
      fail(Errc::ParseError, "unknown model kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    fail(Errc::ParseError, std::string("model JSON: ") + e.what());
  }
  return bundle;
}

void save_model(const std::filesystem::path& path, const ModelBundle& bundle) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::Io, "cannot write '" + path.string() + "'");
  out << model_to_json(bundle);
}

ModelBundle load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace helio
