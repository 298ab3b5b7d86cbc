// SPDX-License-Identifier: Apache-2.0
#include "helio/explain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "helio/error.hpp"
#include "helio/features.hpp"
#include "helio/eval.hpp"
#include "helio/parallel.hpp"
#include "helio/rng.hpp"

namespace helio {

namespace {

// Share of `node`'s expectation carried by `child`.
double child_weight(const TreeNode& node, const TreeNode& child) {
  if (node.n_samples <= 0) return 0.5;
  return static_cast<double>(child.n_samples) / static_cast<double>(node.n_samples);
}

struct PathElement {
  std::int32_t feature = -1;
  double zero_fraction = 0.0;
  double one_fraction = 0.0;
  double pweight = 0.0;
};

void extend_path(PathElement* path, std::size_t depth, double zero, double one, std::int32_t feature) {
  path[depth] = {feature, zero, one, depth == 0 ? 1.0 : 0.0};
  const double d1 = static_cast<double>(depth + 1);
  for (std::size_t i = depth; i-- > 0;) {
    path[i + 1].pweight += one * path[i].pweight * static_cast<double>(i + 1) / d1;
    path[i].pweight = zero * path[i].pweight * static_cast<double>(depth - i) / d1;
  }
}

void unwind_path(PathElement* path, std::size_t depth, std::size_t index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  const double d1 = static_cast<double>(depth + 1);
  double next = path[depth].pweight;
  for (std::size_t i = depth; i-- > 0;) {
    if (one != 0.0) {
      const double tmp = path[i].pweight;
      path[i].pweight = next * d1 / (static_cast<double>(i + 1) * one);
      next = tmp - path[i].pweight * zero * static_cast<double>(depth - i) / d1;
    } else {
      path[i].pweight = path[i].pweight * d1 / (zero * static_cast<double>(depth - i));
    }
  }
  for (std::size_t i = index; i < depth; ++i) {
    path[i].feature = path[i + 1].feature;
    path[i].zero_fraction = path[i + 1].zero_fraction;
    path[i].one_fraction = path[i + 1].one_fraction;
  }
}

double unwound_path_sum(const PathElement* path, std::size_t depth, std::size_t index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  const double d1 = static_cast<double>(depth + 1);
  double next = path[depth].pweight;
  double total = 0.0;
  for (std::size_t i = depth; i-- > 0;) {
    if (one != 0.0) {
      const double tmp = next * d1 / (static_cast<double>(i + 1) * one);
      total += tmp;
      next = path[i].pweight - tmp * zero * static_cast<double>(depth - i) / d1;
    } else {
      total += path[i].pweight / zero * d1 / static_cast<double>(depth - i);
    }
  }
  return total;
}

class ShapRecursion {
 public:
  ShapRecursion(const Tree& tree, std::span<const double> x, std::span<double> phi)
      : tree_(tree), x_(x), phi_(phi) {
    const std::size_t max_depth = tree.depth() + 2;
    storage_.resize((max_depth + 1) * (max_depth + 2) / 2 + max_depth);
  }

  void run() { recurse(0, storage_.data(), 0, 1.0, 1.0, -1); }

 private:
  void recurse(std::size_t node_id, PathElement* parent_path, std::size_t depth, double zero, double one,
               std::int32_t feature) {
    // Each level works on its own copy of the path, laid out after the parent's.
    PathElement* path = parent_path + depth + 1;
    std::copy(parent_path, parent_path + depth + 1, path);
    extend_path(path, depth, zero, one, feature);
    const TreeNode& node = tree_.nodes[node_id];

    if (node.is_leaf()) {
      for (std::size_t i = 1; i <= depth; ++i) {
        const double w = unwound_path_sum(path, depth, i);
        phi_[static_cast<std::size_t>(path[i].feature)] += w * (path[i].one_fraction - path[i].zero_fraction) * node.value;
      }
      return;
    }

    const auto f = static_cast<std::size_t>(node.feature);
    const bool go_left = x_[f] < node.threshold;
    const auto hot = static_cast<std::size_t>(go_left ? node.left : node.right);
    const auto cold = static_cast<std::size_t>(go_left ? node.right : node.left);
    const double hot_zero = child_weight(node, tree_.nodes[hot]);
    const double cold_zero = child_weight(node, tree_.nodes[cold]);

    double incoming_zero = 1.0, incoming_one = 1.0;
    std::size_t k = 1;
    for (; k <= depth; ++k)
      if (path[k].feature == node.feature) break;
    if (k <= depth) {
      incoming_zero = path[k].zero_fraction;
      incoming_one = path[k].one_fraction;
      unwind_path(path, depth, k);
      --depth;
    }
    // A branch whose zero and one fractions are both 0 contributes nothing, and
    // unwinding it would divide by zero. Cold branches with no cover are such a case.
    if (hot_zero * incoming_zero > 0.0 || incoming_one > 0.0)
      recurse(hot, path, depth + 1, hot_zero * incoming_zero, incoming_one, node.feature);
    if (cold_zero * incoming_zero > 0.0) recurse(cold, path, depth + 1, cold_zero * incoming_zero, 0.0, node.feature);
  }

  const Tree& tree_;
  std::span<const double> x_;
  std::span<double> phi_;
  std::vector<PathElement> storage_;
};

void check_width(std::size_t expected, std::size_t got) {
  if (expected != got)
    fail(Errc::DimensionMismatch, "model expects " + std::to_string(expected) + " features, got " + std::to_string(got));
}

AttributionMatrix ensemble_shap(const std::vector<Tree>& trees, std::size_t d, const Matrix& x, double scale,
                                double offset) {
  check_width(d, x.cols());
  AttributionMatrix attr;
  attr.base_value = offset;
  for (const auto& t : trees) attr.base_value += scale * t.nodes[0].value;
  attr.phi = Matrix(x.rows(), d);
  parallel_for(x.rows(), [&](std::size_t r) {
    std::vector<double> acc(d, 0.0);
    for (const auto& t : trees) ShapRecursion(t, x.row(r), acc).run();
    auto out = attr.phi.row(r);
    for (std::size_t j = 0; j < d; ++j) out[j] = scale * acc[j];
  });
  return attr;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> default_names(std::size_t d) {
  std::vector<std::string> names(d);
  for (std::size_t j = 0; j < d; ++j) names[j] = "f" + std::to_string(j);
  return names;
}

}  // namespace

std::vector<double> tree_shap_row(const Tree& tree, std::span<const double> x) {
  check_width(tree.feature_count, x.size());
  std::vector<double> phi(tree.feature_count, 0.0);
  ShapRecursion(tree, x, phi).run();
  return phi;
}

AttributionMatrix tree_shap(const ForestModel& model, const Matrix& x) {
  const double scale = model.trees.empty() ? 0.0 : 1.0 / static_cast<double>(model.trees.size());
  auto attr = ensemble_shap(model.trees, model.feature_count, x, scale, 0.0);
  attr.feature_names = default_names(model.feature_count);
  return attr;
}

AttributionMatrix tree_shap(const BoostedModel& model, const Matrix& x) {
  auto attr = ensemble_shap(model.trees, model.feature_count, x, model.config.learning_rate, model.base_score);
  attr.feature_names = default_names(model.feature_count);
  return attr;
}

AttributionMatrix tree_shap(const ModelBundle& bundle, const TabularDataset& ds) {
  if (!is_tree_model(bundle.model)) fail(Errc::NotATreeModel, "SHAP attribution needs a tree ensemble model");
  const Matrix x = bundle.prepare(ds);
  auto attr = std::holds_alternative<ForestModel>(bundle.model) ? tree_shap(std::get<ForestModel>(bundle.model), x)
                                                                 : tree_shap(std::get<BoostedModel>(bundle.model), x);
  attr.feature_names = bundle.feature_names;
  return attr;
}

double tree_conditional_expectation(const Tree& tree, std::span<const double> x, const std::vector<bool>& known) {
  auto rec = [&](auto&& self, std::size_t i) -> double {
    const auto& n = tree.nodes[i];
    if (n.is_leaf()) return n.value;
    const auto f = static_cast<std::size_t>(n.feature);
    const auto l = static_cast<std::size_t>(n.left);
    const auto r = static_cast<std::size_t>(n.right);
    if (known[f]) return self(self, x[f] < n.threshold ? l : r);
    return child_weight(n, tree.nodes[l]) * self(self, l) + child_weight(n, tree.nodes[r]) * self(self, r);
  };
  return rec(rec, 0);
}

namespace {

template <class Value>
std::vector<double> enumerate_shapley(std::size_t d, Value&& value) {
  if (d > 12) fail(Errc::TooManyFeatures, "brute-force Shapley limited to 12 features, got " + std::to_string(d));
  const std::size_t subsets = std::size_t{1} << d;
  std::vector<double> v(subsets);
  std::vector<bool> known(d);
  for (std::size_t s = 0; s < subsets; ++s) {
    for (std::size_t j = 0; j < d; ++j) known[j] = (s >> j) & 1U;
    v[s] = value(known);
  }
  // weight[m] = m! (d - m - 1)! / d!
  std::vector<double> weight(d);
  for (std::size_t m = 0; m < d; ++m)
    weight[m] = std::exp(std::lgamma(static_cast<double>(m) + 1.0) + std::lgamma(static_cast<double>(d - m)) -
                         std::lgamma(static_cast<double>(d) + 1.0));
  std::vector<double> phi(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t bit = std::size_t{1} << j;
    for (std::size_t s = 0; s < subsets; ++s) {
      if (s & bit) continue;
      const auto m = static_cast<std::size_t>(std::popcount(s));
      phi[j] += weight[m] * (v[s | bit] - v[s]);
    }
  }
  return phi;
}

}  // namespace

std::vector<double> brute_force_shapley(const Tree& tree, std::span<const double> x) {
  check_width(tree.feature_count, x.size());
  return enumerate_shapley(tree.feature_count, [&](const std::vector<bool>& k) { return tree_conditional_expectation(tree, x, k); });
}

std::vector<double> brute_force_shapley(const ForestModel& model, std::span<const double> x) {
  check_width(model.feature_count, x.size());
  const double scale = 1.0 / static_cast<double>(std::max<std::size_t>(model.trees.size(), 1));
  return enumerate_shapley(model.feature_count, [&](const std::vector<bool>& k) {
    double s = 0.0;
    for (const auto& t : model.trees) s += tree_conditional_expectation(t, x, k);
    return scale * s;
  });
}

std::vector<double> brute_force_shapley(const BoostedModel& model, std::span<const double> x) {
  check_width(model.feature_count, x.size());
  return enumerate_shapley(model.feature_count, [&](const std::vector<bool>& k) {
    double s = model.base_score;
    for (const auto& t : model.trees) s += model.config.learning_rate * tree_conditional_expectation(t, x, k);
    return s;
  });
}

ImportanceSummary importance_summary(const AttributionMatrix& attr, const Matrix& values) {
  const std::size_t n = attr.phi.rows(), d = attr.phi.cols();
  if (values.rows() != n || values.cols() != d)
    fail(Errc::DimensionMismatch, "feature values do not match the attribution matrix shape");
  ImportanceSummary out;
  for (std::size_t j = 0; j < d; ++j) {
    const auto phi = attr.phi.column(j);
    const auto val = values.column(j);
    FeatureImportance fi;
    fi.feature = j < attr.feature_names.size() ? attr.feature_names[j] : "f" + std::to_string(j);
    double s = 0.0;
    for (double p : phi) s += std::abs(p);
    fi.mean_abs_shap = n ? s / static_cast<double>(n) : 0.0;
    if (n >= 2) {
      try {
        fi.sign_profile = pearson(val, phi);
      } catch (const Error& e) {
        if (e.code() != Errc::ConstantVector) throw;
        fi.sign_profile = 0.0;
      }
    }
    out.features.push_back(std::move(fi));
  }
  std::stable_sort(out.features.begin(), out.features.end(),
                   [](const FeatureImportance& a, const FeatureImportance& b) { return a.mean_abs_shap > b.mean_abs_shap; });
  return out;
}

void write_attribution_csv(const std::filesystem::path& path, const AttributionMatrix& attr, const Matrix& values) {
  if (values.rows() != attr.phi.rows() || values.cols() != attr.phi.cols())
    fail(Errc::DimensionMismatch, "feature values do not match the attribution matrix shape");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::Io, "cannot write '" + path.string() + "'");
  out << "row,feature,value,phi\n";
  for (std::size_t r = 0; r < attr.phi.rows(); ++r)
    for (std::size_t j = 0; j < attr.phi.cols(); ++j)
      out << r << ',' << attr.feature_names.at(j) << ',' << num(values(r, j)) << ',' << num(attr.phi(r, j)) << '\n';
}

void write_summary_csv(const std::filesystem::path& path, const ImportanceSummary& summary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::Io, "cannot write '" + path.string() + "'");
  out << "feature,mean_abs_shap,sign_profile\n";
  for (const auto& f : summary.features) out << f.feature << ',' << num(f.mean_abs_shap) << ',' << num(f.sign_profile) << '\n';
}

LearningCurve learning_curve(const FitFn& fit, const TabularDataset& ds, std::span<const double> fractions,
                             const FoldPlan& folds, std::uint64_t seed) {
  if (fractions.empty()) fail(Errc::InvalidConfig, "learning curve needs at least one fraction");
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (!(fractions[i] > 0.0 && fractions[i] <= 1.0)) fail(Errc::InvalidConfig, "curve fractions must lie in (0, 1]");
    if (i && !(fractions[i] > fractions[i - 1])) fail(Errc::InvalidConfig, "curve fractions must be strictly ascending");
  }
  if (folds.assignments.size() != ds.row_count()) fail(Errc::DimensionMismatch, "fold plan does not cover the dataset");

  LearningCurve curve;
  curve.fractions.assign(fractions.begin(), fractions.end());
  for (double f : fractions) {
    double train_sum = 0.0, val_sum = 0.0, size_sum = 0.0;
    for (std::size_t k = 0; k < folds.k; ++k) {
      auto train_idx = folds.train_indices(k);
      const auto m = static_cast<std::size_t>(std::ceil(f * static_cast<double>(train_idx.size())));
      if (m < 2)
        fail(Errc::TooFewRows, "fraction " + std::to_string(f) + " leaves " + std::to_string(m) + " training rows");
      CounterRng rng(seed, StreamTag::curve_subset, k);
      const auto perm = permutation(train_idx.size(), rng);
      std::vector<std::size_t> chosen(m);
      for (std::size_t i = 0; i < m; ++i) chosen[i] = train_idx[perm[i]];
      std::sort(chosen.begin(), chosen.end());

      const auto train = ds.subset(chosen);
      const auto val = ds.subset(folds.validation_indices(k));
      Predictor predict;
      try {
        predict = fit(train);
      } catch (const Error& e) {
        throw e.with_context("fold " + std::to_string(k));
      }
      train_sum += mae(predict(train), train.target);
      val_sum += mae(predict(val), val.target);
      size_sum += static_cast<double>(m);
    }
    const double kf = static_cast<double>(folds.k);
    curve.train_sizes.push_back(static_cast<std::size_t>(std::llround(size_sum / kf)));
    curve.train_mae.push_back(train_sum / kf);
    curve.val_mae.push_back(val_sum / kf);
  }
  return curve;
}

void write_curve_csv(const std::filesystem::path& path, const LearningCurve& curve) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::Io, "cannot write '" + path.string() + "'");
  out << "fraction,train_size,train_mae,val_mae\n";
  for (std::size_t i = 0; i < curve.train_sizes.size(); ++i)
    out << num(curve.fractions[i]) << ',' << curve.train_sizes[i] << ',' << num(curve.train_mae[i]) << ','
        << num(curve.val_mae[i]) << '\n';
}

}  // namespace helio
