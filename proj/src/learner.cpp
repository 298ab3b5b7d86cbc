// SPDX-License-Identifier: Apache-2.0
#include "helio/learner.hpp"

#include <memory>

#include "helio/error.hpp"

namespace helio {

std::string_view learner_name(LearnerKind kind) noexcept {
  switch (kind) {
    case LearnerKind::forest: return "forest";
    case LearnerKind::boosted: return "boosted";
    case LearnerKind::mlp: return "mlp";
  }
  return "forest";
}

LearnerKind parse_learner(std::string_view name) {
  if (name == "forest" || name == "random_forest") return LearnerKind::forest;
  if (name == "boosted" || name == "gbdt") return LearnerKind::boosted;
  if (name == "mlp") return LearnerKind::mlp;
  fail(Errc::InvalidConfig, "unknown learner '" + std::string(name) + "'");
}

void LearnerSpec::validate() const {
  switch (kind) {
    case LearnerKind::forest: forest.validate(); break;
    case LearnerKind::boosted: boosted.validate(); break;
    case LearnerKind::mlp:
      mlp.validate();
      if (hidden.empty()) fail(Errc::BadArchitecture, "mlp needs at least one hidden layer");
      for (auto h : hidden)
        if (h == 0) fail(Errc::BadArchitecture, "hidden layer of width 0");
      break;
  }
  if (selection) {
    if (const auto* t = std::get_if<ThresholdRule>(&*selection); t && !(t->t >= 0.0 && t->t <= 1.0))
      fail(Errc::InvalidConfig, "selection threshold must lie in [0, 1]");
    if (const auto* k = std::get_if<TopKRule>(&*selection); k && k->k == 0)
      fail(Errc::InvalidConfig, "selection top_k must be >= 1");
  }
}

ModelBundle fit_learner(const LearnerSpec& spec, const TabularDataset& train) {
  ModelBundle bundle;
  TabularDataset ds = train;
  if (spec.selection) {
    const auto sel = select_features(correlation_report(ds), *spec.selection);
    ds = project_features(ds, sel.selected);
  }
  bundle.feature_names = ds.feature_names();
  if (spec.standardize_inputs || spec.kind == LearnerKind::mlp) {
    bundle.input_scaling = fit_standardizer(ds);
    ds = apply_standardizer(ds, *bundle.input_scaling);
  }
  switch (spec.kind) {
    case LearnerKind::forest: bundle.model = fit_forest(ds.rows, ds.target, spec.forest); break;
    case LearnerKind::boosted: bundle.model = fit_boosted(ds.rows, ds.target, spec.boosted); break;
    case LearnerKind::mlp: {
      const auto arch = MlpArchitecture::with_hidden(ds.feature_count(), spec.hidden);
      bundle.model = train_mlp(ds.rows, ds.target, arch, spec.mlp);
      break;
    }
  }
  return bundle;
}

FitFn make_fit_fn(const LearnerSpec& spec) {
  return [spec](const TabularDataset& train) -> Predictor {
    auto bundle = std::make_shared<const ModelBundle>(fit_learner(spec, train));
    return [bundle](const TabularDataset& ds) { return bundle->predict(ds); };
  };
}

}  // namespace helio
