// SPDX-License-Identifier: Apache-2.0
//
// Acceptance harness: evaluates every acceptance criterion, prints one
// PASS/FAIL line per criterion and a summary. The exit status reports harness
// failures only (a crash or an unexpected exception outside a criterion), so a
// criterion that fails on its merits is reported but does not fail ctest.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "helio/boost.hpp"
#include "helio/dataset.hpp"
#include "helio/error.hpp"
#include "helio/eval.hpp"
#include "helio/explain.hpp"
#include "helio/features.hpp"
#include "helio/forest.hpp"
#include "helio/learner.hpp"
#include "helio/mlp.hpp"
#include "helio/pipeline.hpp"
#include "helio/tuner.hpp"
#include "oracles.hpp"

using namespace helio;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Pinned synthetic home site shared by the pipeline-level criteria.
struct Home {
  TabularDataset ds = synth_generate(8760, 42);
  SplitIndices split = split_train_test(ds, 0.8, 0);
  TabularDataset train = ds.subset(split.train);
  TabularDataset test = ds.subset(split.test);
  std::optional<ModelBundle> forest;

  const ModelBundle& forest_model() {
    if (!forest) forest = fit_learner(LearnerSpec{}, train);
    return *forest;
  }
};

Outcome metric_oracles() {
  const std::vector<double> p{1, 2}, a{2, 4};
  bool ok = std::fabs(mae(p, a) - 1.5) <= 1e-12 && std::fabs(rmse(p, a) - std::sqrt(2.5)) <= 1e-12;
  ok = ok && r2(std::vector<double>{1, 2, 4}, std::vector<double>{1, 2, 3}) == 0.5;
  const std::vector<double> actual{1, 5, 2, 8, 3};
  const double m = (1 + 5 + 2 + 8 + 3) / 5.0;
  const double r2_mean = r2(std::vector<double>(5, m), actual);
  const double r2_self = r2(actual, actual);
  ok = ok && r2_mean == 0.0 && r2_self == 1.0;
  return {ok, fmt("r2(mean)=%g r2(actual)=%g", r2_mean, r2_self)};
}

Outcome standardization() {
  oracle::Gen g(1);
  double worst_mean = 0, worst_sd = 0, worst_rt = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + g.below(300), d = 1 + g.below(8);
    TabularDataset ds;
    for (std::size_t c = 0; c < d; ++c) ds.schema.push_back({"f" + std::to_string(c), ColumnKind::feature, ""});
    ds.schema.push_back({"y", ColumnKind::target, ""});
    ds.rows = Matrix(n, d);
    const double scale = std::exp(g.uniform(-5, 5)), shift = g.uniform(-1e3, 1e3);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < d; ++c) ds.rows(r, c) = shift + scale * g.normal();
    ds.target.assign(n, 0.0);
    const auto params = fit_standardizer(ds);
    const auto z = apply_standardizer(ds, params);
    const auto back = invert_standardizer(z, params);
    for (std::size_t c = 0; c < d; ++c) {
      const auto col = z.rows.column(c);
      long double sum = 0;
      for (double v : col) sum += v;
      const double mu = static_cast<double>(sum / static_cast<long double>(n));
      double var = 0;
      for (double v : col) var += (v - mu) * (v - mu);
      worst_mean = std::max(worst_mean, std::fabs(mu));
      worst_sd = std::max(worst_sd, std::fabs(std::sqrt(var / static_cast<double>(n)) - 1.0));
      for (std::size_t r = 0; r < n; ++r)
        worst_rt = std::max(worst_rt, std::fabs(back.rows(r, c) - ds.rows(r, c)) / std::max(1.0, std::fabs(ds.rows(r, c))));
    }
  }
  return {worst_mean <= 1e-9 && worst_sd <= 1e-9 && worst_rt <= 1e-9,
          fmt("max |mean|=%.2e max |sd-1|=%.2e max round-trip=%.2e", worst_mean, worst_sd, worst_rt)};
}

Outcome split_and_folds() {
  std::size_t checked = 0, splits = 0;
  for (std::size_t n = 2; n <= 500; ++n) {
    for (double frac : {0.25, 0.5, 0.8}) {
      const auto n_train = static_cast<std::size_t>(std::llround(frac * static_cast<double>(n)));
      if (n_train == 0 || n_train == n) continue;  // rejected with TooFewRows
      const auto s = split_train_test(n, frac, n);
      std::vector<int> seen(n, 0);
      for (auto i : s.train) ++seen[i];
      for (auto i : s.test) ++seen[i];
      if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; }) || s.train.size() != n_train)
        return {false, fmt("split is not a partition at n=%zu, fraction %g", n, frac)};
      ++splits;
    }
    for (std::size_t k = 2; k <= std::min<std::size_t>(10, n); ++k) {
      const auto f = make_folds(n, k, n * 31 + k);
      std::vector<int> hits(n, 0);
      std::size_t lo = n, hi = 0;
      for (std::size_t i = 0; i < k; ++i) {
        const auto v = f.validation_indices(i);
        const auto t = f.train_indices(i);
        if (v.size() + t.size() != n) return {false, fmt("fold %zu of k=%zu, n=%zu is not a partition", i, k, n)};
        for (auto r : v) ++hits[r];
        lo = std::min(lo, v.size());
        hi = std::max(hi, v.size());
      }
      if (std::any_of(hits.begin(), hits.end(), [](int c) { return c != 1; }) || hi - lo > 1)
        return {false, fmt("folds unbalanced or overlapping at n=%zu k=%zu", n, k)};
      ++checked;
    }
  }
  return {true, fmt("%zu splits, %zu fold plans", splits, checked)};
}

Outcome pcc_oracle() {
  oracle::Gen g(4);
  double worst = 0, worst_affine = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + g.below(200);
    auto x = g.vec(n, -10, 10), y = g.vec(n, -10, 10);
    for (std::size_t i = 0; i < n; ++i) y[i] += g.uniform(-2, 2) * x[i];
    const double r = pearson(x, y);
    worst = std::max(worst, std::fabs(r - oracle::pearson(x, y)));
    const double a = std::exp(g.uniform(-3, 3)), b = g.uniform(-50, 50);
    auto xs = x;
    for (auto& v : xs) v = a * v + b;
    worst_affine = std::max(worst_affine, std::fabs(pearson(xs, y) - r));
  }
  return {worst <= 1e-12 && worst_affine <= 1e-12, fmt("max oracle diff %.2e, max affine diff %.2e", worst, worst_affine)};
}

Outcome tree_split_oracle() {
  oracle::Gen g(5);
  int compared = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + g.below(49), d = 1 + g.below(5);
    Matrix x(n, d);
    std::vector<double> y(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < d; ++c) x(r, c) = t % 2 ? g.uniform(-3, 3) : static_cast<double>(g.below(6));
      y[r] = g.uniform(-5, 5);
    }
    const auto expected = oracle::exhaustive_split(x, y);
    TreeParams p;
    p.max_depth = 1;
    const auto tree = fit_tree(x, y, p);
    if (!expected.found) {
      if (tree.nodes.size() != 1) return {false, fmt("dataset %d: split found where none exists", t)};
      continue;
    }
    if (tree.nodes.size() != 3) return {false, fmt("dataset %d: no split", t)};
    if (static_cast<std::size_t>(tree.nodes[0].feature) != expected.feature || tree.nodes[0].threshold != expected.threshold)
      return {false, fmt("dataset %d: got (%d, %g), oracle (%zu, %g)", t, tree.nodes[0].feature, tree.nodes[0].threshold,
                         expected.feature, expected.threshold)};
    ++compared;
  }
  return {true, fmt("%d/200 root splits identical to the exhaustive scan", compared)};
}

Outcome mlp_gradient() {
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    oracle::Gen g(600 + seed);
    Matrix x(16, 7);
    std::vector<double> y(16);
    for (std::size_t r = 0; r < 16; ++r) {
      for (std::size_t c = 0; c < 7; ++c) x(r, c) = g.normal();
      y[r] = g.normal();
    }
    auto m = init_mlp(MlpArchitecture{{7, 4, 1}}, seed);
    for (auto& b : m.biases) b.setConstant(0.1);
    const double alpha = 1e-4;
    const auto got = loss_and_gradient(m, x, y, alpha);
    const auto fd = oracle::finite_difference(m, [&](const MlpModel& mm) { return loss_and_gradient(mm, x, y, alpha).loss; });
    auto rel = [](double a, double b) { return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-7}); };
    for (std::size_t l = 0; l < fd.weights.size(); ++l) {
      for (Eigen::Index i = 0; i < fd.weights[l].size(); ++i) worst = std::max(worst, rel(got.grad.weights[l](i), fd.weights[l](i)));
      for (Eigen::Index i = 0; i < fd.biases[l].size(); ++i) worst = std::max(worst, rel(got.grad.biases[l](i), fd.biases[l](i)));
    }
  }
  return {worst <= 1e-4, fmt("max relative error %.2e over 3 seeds", worst)};
}

Outcome tree_shap_oracle(Home& home) {
  oracle::Gen g(7);
  double worst = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 1 + g.below(6);
    const auto tree = oracle::random_tree(g, d, 1 + g.below(3));
    const auto x = g.vec(d);
    const auto fast = tree_shap_row(tree, x);
    const auto brute = brute_force_shapley(tree, x);
    for (std::size_t j = 0; j < d; ++j) worst = std::max(worst, std::fabs(fast[j] - brute[j]));
  }
  ForestConfig fc;
  fc.n_estimators = 10;
  const auto forest = fit_forest(home.train.rows, home.train.target, fc);
  const auto attr = tree_shap(forest, home.test.rows);
  const auto pred = predict_forest(forest, home.test.rows);
  double worst_forest = 0, worst_local = 0;
  for (std::size_t r = 0; r < 20; ++r) {
    const auto brute = brute_force_shapley(forest, home.test.rows.row(r));
    for (std::size_t j = 0; j < brute.size(); ++j) worst_forest = std::max(worst_forest, std::fabs(brute[j] - attr.phi(r, j)));
  }
  for (std::size_t r = 0; r < home.test.row_count(); ++r) {
    double s = attr.base_value;
    for (std::size_t j = 0; j < attr.phi.cols(); ++j) s += attr.phi(r, j);
    worst_local = std::max(worst_local, std::fabs(s - pred[r]));
  }
  return {worst <= 1e-9 && worst_forest <= 1e-9 && worst_local <= 1e-6,
          fmt("random trees %.2e, 10-tree forest %.2e (20 rows), local accuracy %.2e (%zu test rows)", worst, worst_forest,
              worst_local, home.test.row_count())};
}

Outcome gp_ei() {
  const std::vector<std::vector<double>> x{{0.1}, {0.4}, {0.55}, {0.9}};
  const std::vector<double> y{0.2, -0.4, 0.1, 0.7};
  const GpSurrogate gp(x, y, GpHyper{{0.05}, 1.0, kGpNoiseFloor});
  double worst = 0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::fabs(gp.predict(x[i]).first - y[i]));
  const double spot = expected_improvement(0.0, 1.0, 0.0);
  const auto fitted = fit_gp(x, y, 0);
  double min_ei = std::numeric_limits<double>::infinity();
  for (const auto& c : suggest_candidates(fitted, 1, 0)) min_ei = std::min(min_ei, expected_improvement(fitted, c, -0.4));
  return {worst <= 1e-6 && std::fabs(spot - 0.39894) <= 1e-5 && min_ei >= 0.0,
          fmt("interpolation %.2e, EI(best, 1)=%.5f, min EI over candidates %.3g", worst, spot, min_ei)};
}

Outcome tuner_efficacy() {
  TabularDataset ds;
  ds.schema = {{"x", ColumnKind::feature, ""}, {"y", ColumnKind::target, ""}};
  ds.rows = Matrix(20, 1);
  ds.target.assign(20, 0.0);
  const Trainer quadratic = [](const TabularDataset&, const Params& p) -> Predictor {
    const double v = std::get<double>(p.at("x"));
    const double c = (v - 0.3) * (v - 0.3);
    return [c](const TabularDataset& d) { return std::vector<double>(d.row_count(), c); };
  };
  const ParamSpace space{{{"x", ContinuousRange{0, 1}}}};
  TunerConfig cfg;
  cfg.n_initial = 10;
  cfg.n_iterations = 20;
  cfg.k_folds = 2;
  const auto a = tune(quadratic, ds, space, cfg);
  const auto b = tune(quadratic, ds, space, cfg);
  bool same = a.history.size() == b.history.size();
  for (std::size_t i = 0; same && i < a.history.size(); ++i)
    same = a.history[i].params == b.history[i].params && a.history[i].cv_scores == b.history[i].cv_scores;
  const double best = std::get<double>(a.best.params.at("x"));
  return {std::fabs(best - 0.3) <= 0.05 && same, fmt("best x=%.4f, history reproducible: %s", best, same ? "yes" : "no")};
}

Outcome table_ii(Home& home) {
  const auto forest = evaluate(home.forest_model(), home.ds, home.split);
  LearnerSpec first;
  first.kind = LearnerKind::boosted;
  first.boosted.order = BoostOrder::first;
  LearnerSpec second = first;
  second.boosted.order = BoostOrder::second;
  const auto m1 = evaluate(fit_learner(first, home.train), home.ds, home.split);
  const auto m2 = evaluate(fit_learner(second, home.train), home.ds, home.split);
  return {forest.r2 >= 0.90 && m1.r2 >= 0.80 && m2.r2 >= 0.80,
          fmt("R2 forest %.4f (RMSE %.2f), boosted first order %.4f, second order %.4f", forest.r2, forest.rmse, m1.r2, m2.r2)};
}

// Counts seeds where the top-5 PCC-selected MLP is at least as accurate as the
// all-features MLP, on the home site plus three noise columns.
std::pair<int, std::string> selection_wins(const std::vector<std::string>& cyclic) {
  int wins = 0;
  std::string scores;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto ds = synth_generate(8760, 42);
    for (const auto& c : cyclic) ds = encode_cyclic(ds, c);
    ds = add_noise_features(ds, 3, seed);
    const auto split = split_train_test(ds, 0.8, seed);
    const auto train = ds.subset(split.train);
    LearnerSpec all;
    all.kind = LearnerKind::mlp;
    all.mlp.seed = seed;
    LearnerSpec selected = all;
    selected.selection = TopKRule{5};
    const double r_all = evaluate(fit_learner(all, train), ds, split).rmse;
    const double r_sel = evaluate(fit_learner(selected, train), ds, split).rmse;
    if (r_sel <= r_all) ++wins;
    scores += fmt("%s%.1f/%.1f", scores.empty() ? "" : " ", r_sel, r_all);
  }
  return {wins, scores};
}

Outcome feature_selection() {
  const auto [wins, scores] = selection_wins({});
  const auto [cyc_wins, cyc_scores] = selection_wins({"wind_direction"});
  return {wins >= 4, fmt("selected <= all on %d/5 seeds (selected/all RMSE: %s); with cyclic wind_direction: %d/5 (%s)", wins,
                         scores.c_str(), cyc_wins, cyc_scores.c_str())};
}

Outcome learning_curve_shape(Home& home) {
  const std::vector<double> fractions{0.1, 1.0};
  const auto folds = make_folds(home.train.row_count(), 5, 0);
  const auto c = learning_curve(make_fit_fn(LearnerSpec{}), home.train, fractions, folds, 0);
  const double gap_lo = c.val_mae[0] - c.train_mae[0], gap_hi = c.val_mae[1] - c.train_mae[1];
  return {c.val_mae[1] < c.val_mae[0] && gap_lo > gap_hi,
          fmt("val MAE %.2f -> %.2f, train/val gap %.2f -> %.2f", c.val_mae[0], c.val_mae[1], gap_lo, gap_hi)};
}

Outcome shap_ranking(Home& home) {
  const std::size_t rows = std::min<std::size_t>(200, home.test.row_count());
  std::vector<std::size_t> idx(rows);
  for (std::size_t i = 0; i < rows; ++i) idx[i] = i;
  const auto sample = home.test.subset(idx);
  const auto attr = tree_shap(home.forest_model(), sample);
  const auto summary = importance_summary(attr, sample.rows);
  std::string order;
  std::size_t pressure_rank = 0;
  for (std::size_t i = 0; i < summary.features.size(); ++i) {
    const auto& f = summary.features[i];
    if (f.feature == "pressure") pressure_rank = i + 1;
    order += fmt("%s%s %.1f", i ? ", " : "", f.feature.c_str(), f.mean_abs_shap);
  }
  return {summary.features[0].feature == "temperature" && pressure_rank > 3,
          fmt("mean |SHAP| on %zu test rows: %s", rows, order.c_str())};
}

Outcome transfer(Home& home) {
  SynthCoefficients shifted;
  shifted.temperature = 0.010;
  const LabeledDataset home_site{"home", "0 km", home.ds};
  const std::vector<LabeledDataset> away{{"shifted", "temperature coefficient 0.010", synth_generate(8760, 42, shifted)}};
  const auto report = transfer_test(home.forest_model(), home_site, home.split, away);
  const double h = report.rows[0].metrics.rmse, a = report.rows[1].metrics.rmse;
  return {a >= h, fmt("home RMSE %.2f, shifted RMSE %.2f", h, a)};
}

Outcome determinism(const fs::path& out) {
  std::vector<RunManifest> runs;
  for (const char* name : {"run_a", "run_b"}) {
    auto cfg = parse_config(nlohmann::json::object());
    cfg.output_dir = out / name;
    fs::remove_all(cfg.output_dir);
    runs.push_back(run_command("run", cfg));
  }
  const auto& a = runs[0].artifacts;
  const auto& b = runs[1].artifacts;
  bool same = a.size() == b.size();
  for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i].path == b[i].path && a[i].sha256 == b[i].sha256;
  return {same, fmt("%zu artifacts, hashes %s", a.size(), same ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"helio acceptance criteria"};
  fs::path out = fs::temp_directory_path() / "helio_acceptance";
  std::vector<int> only;
  app.add_option("--out", out, "scratch directory for pipeline runs");
  app.add_option("--only", only, "evaluate only these criterion numbers")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  Home home;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"metric oracles", metric_oracles},
      {"standardization fixed point", standardization},
      {"split/fold partitions", split_and_folds},
      {"pearson oracle", pcc_oracle},
      {"tree split oracle", tree_split_oracle},
      {"mlp gradient check", mlp_gradient},
      {"tree shap oracle", [&] { return tree_shap_oracle(home); }},
      {"gp and expected improvement", gp_ei},
      {"tuner efficacy", tuner_efficacy},
      {"synthetic model accuracy", [&] { return table_ii(home); }},
      {"feature-selection benefit", feature_selection},
      {"learning curve", [&] { return learning_curve_shape(home); }},
      {"shap ranking", [&] { return shap_ranking(home); }},
      {"transfer degradation", [&] { return transfer(home); }},
      {"end-to-end determinism", [&] { return determinism(out); }},
  };

  int passed = 0, evaluated = 0;
  std::string failing;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
    ++evaluated;
    if (o.pass) {
      ++passed;
    } else {
      failing += (failing.empty() ? "" : ", ") + std::to_string(id);
    }
  }
  std::printf("%d/%d criteria passed%s%s\n", passed, evaluated, failing.empty() ? "" : "; failing: ", failing.c_str());
  return 0;
}
