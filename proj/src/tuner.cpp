// SPDX-License-Identifier: Apache-2.0
#include "helio/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>

#include "helio/error.hpp"
#include "helio/eval.hpp"
#include "helio/rng.hpp"

namespace helio {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double as_real(const ParamValue& v, const std::string& name) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  fail(Errc::OutOfDomain, "parameter '" + name + "' must be numeric");
}

std::int64_t as_int(const ParamValue& v, const std::string& name) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* d = std::get_if<double>(&v); d && std::isfinite(*d) && std::floor(*d) == *d)
    return static_cast<std::int64_t>(*d);
  fail(Errc::OutOfDomain, "parameter '" + name + "' must be an integer");
}

}  // namespace

void ParamSpace::validate() const {
  std::set<std::string> seen;
  for (const auto& dim : dims) {
    if (dim.name.empty()) fail(Errc::InvalidConfig, "search dimension without a name");
    if (!seen.insert(dim.name).second) fail(Errc::InvalidConfig, "duplicate search dimension '" + dim.name + "'");
    std::visit(Overloaded{
                   [&](const ContinuousRange& r) {
                     if (!(r.lo < r.hi)) fail(Errc::InvalidConfig, "dimension '" + dim.name + "' needs lo < hi");
                   },
                   [&](const LogRange& r) {
                     if (!(r.lo > 0.0 && r.lo < r.hi))
                       fail(Errc::InvalidConfig, "log dimension '" + dim.name + "' needs 0 < lo < hi");
                   },
                   [&](const IntegerRange& r) {
                     if (!(r.lo < r.hi)) fail(Errc::InvalidConfig, "dimension '" + dim.name + "' needs lo < hi");
                   },
                   [&](const Choice& c) {
                     if (c.options.empty()) fail(Errc::InvalidConfig, "categorical '" + dim.name + "' has no options");
                   },
               },
               dim.domain);
  }
}

std::vector<double> encode(const Params& params, const ParamSpace& space) {
  std::vector<double> u;
  u.reserve(space.size());
  for (const auto& dim : space.dims) {
    const auto it = params.find(dim.name);
    if (it == params.end()) fail(Errc::OutOfDomain, "parameter '" + dim.name + "' missing");
    const ParamValue& v = it->second;
    u.push_back(std::visit(
        Overloaded{
            [&](const ContinuousRange& r) {
              const double x = as_real(v, dim.name);
              if (!(x >= r.lo && x <= r.hi)) fail(Errc::OutOfDomain, "parameter '" + dim.name + "' outside its range");
              return (x - r.lo) / (r.hi - r.lo);
            },
            [&](const LogRange& r) {
              const double x = as_real(v, dim.name);
              if (!(x >= r.lo && x <= r.hi)) fail(Errc::OutOfDomain, "parameter '" + dim.name + "' outside its range");
              return (std::log(x) - std::log(r.lo)) / (std::log(r.hi) - std::log(r.lo));
            },
            [&](const IntegerRange& r) {
              const auto x = as_int(v, dim.name);
              if (x < r.lo || x > r.hi) fail(Errc::OutOfDomain, "parameter '" + dim.name + "' outside its range");
              return static_cast<double>(x - r.lo) / static_cast<double>(r.hi - r.lo);
            },
            [&](const Choice& c) {
              const auto* s = std::get_if<std::string>(&v);
              if (!s) fail(Errc::OutOfDomain, "parameter '" + dim.name + "' must be a string");
              const auto pos = std::find(c.options.begin(), c.options.end(), *s);
              if (pos == c.options.end()) fail(Errc::OutOfDomain, "'" + *s + "' is not an option of '" + dim.name + "'");
              if (c.options.size() == 1) return 0.0;
              return static_cast<double>(pos - c.options.begin()) / static_cast<double>(c.options.size() - 1);
            },
        },
        dim.domain));
  }
  return u;
}

Params decode(std::span<const double> u, const ParamSpace& space) {
  if (u.size() != space.size()) fail(Errc::DimensionMismatch, "encoded point has the wrong dimension");
  Params out;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& dim = space.dims[i];
    const double t = std::clamp(std::isfinite(u[i]) ? u[i] : 0.0, 0.0, 1.0);
    out[dim.name] = std::visit(
        Overloaded{
            [&](const ContinuousRange& r) -> ParamValue { return std::clamp(r.lo + t * (r.hi - r.lo), r.lo, r.hi); },
            [&](const LogRange& r) -> ParamValue {
              return std::clamp(std::exp(std::log(r.lo) + t * (std::log(r.hi) - std::log(r.lo))), r.lo, r.hi);
            },
            [&](const IntegerRange& r) -> ParamValue {
              const double span = static_cast<double>(r.hi - r.lo);
              return std::clamp<std::int64_t>(r.lo + std::llround(t * span), r.lo, r.hi);
            },
            [&](const Choice& c) -> ParamValue {
              const auto idx = static_cast<std::size_t>(std::llround(t * static_cast<double>(c.options.size() - 1)));
              return c.options[std::min(idx, c.options.size() - 1)];
            },
        },
        dim.domain);
  }
  return out;
}

Trial cv_objective(const Trainer& trainer, const TabularDataset& ds, const FoldPlan& folds, const Params& params) {
  if (folds.assignments.size() != ds.row_count()) fail(Errc::DimensionMismatch, "fold plan does not cover the dataset");
  Trial trial;
  trial.params = params;
  for (std::size_t k = 0; k < folds.k; ++k) {
    try {
      const auto train = ds.subset(folds.train_indices(k));
      const auto val = ds.subset(folds.validation_indices(k));
      const auto predict = trainer(train, params);
      trial.cv_scores.push_back(rmse(predict(val), val.target));
    } catch (const Error& e) {
      throw e.with_context("fold " + std::to_string(k));
    }
  }
  double s = 0.0;
  for (double v : trial.cv_scores) s += v;
  trial.mean_score = trial.cv_scores.empty() ? kInf : s / static_cast<double>(trial.cv_scores.size());
  return trial;
}

// ---------------------------------------------------------------- GP

GpSurrogate::GpSurrogate(std::vector<std::vector<double>> x, std::vector<double> y, GpHyper hyper)
    : x_(std::move(x)), y_(std::move(y)), hyper_(std::move(hyper)) {
  const auto n = x_.size();
  if (n < 1 || y_.size() != n) fail(Errc::TooFewSamples, "gaussian process needs observations");
  const std::size_t d = x_[0].size();
  for (const auto& p : x_)
    if (p.size() != d) fail(Errc::DimensionMismatch, "gaussian process inputs differ in dimension");
  if (hyper_.length_scales.size() != d) fail(Errc::DimensionMismatch, "one length-scale per input dimension required");
  hyper_.noise_var = std::max(hyper_.noise_var, kGpNoiseFloor);

  double mean = 0.0;
  for (double v : y_) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : y_) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  y_mean_ = mean;
  y_scale_ = var > 0.0 ? std::sqrt(var) : 1.0;

  Eigen::MatrixXd k(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) k(i, j) = k(j, i) = kernel(x_[i], x_[j]);
  k.diagonal().array() += hyper_.noise_var;
  llt_.compute(k);
  if (llt_.info() != Eigen::Success) fail(Errc::SingularKernel, "kernel matrix is not positive definite");
  Eigen::VectorXd ys(n);
  for (std::size_t i = 0; i < n; ++i) ys(i) = (y_[i] - y_mean_) / y_scale_;
  alpha_ = llt_.solve(ys);
  const Eigen::MatrixXd l = llt_.matrixL();
  lml_ = -0.5 * ys.dot(alpha_) - l.diagonal().array().log().sum() -
         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

double GpSurrogate::kernel(std::span<const double> a, std::span<const double> b) const noexcept {
  double r2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = (a[i] - b[i]) / hyper_.length_scales[i];
    r2 += t * t;
  }
  const double r = std::sqrt(5.0 * r2);
  return hyper_.signal_var * (1.0 + r + r * r / 3.0) * std::exp(-r);
}

std::pair<double, double> GpSurrogate::predict(std::span<const double> x) const {
  const auto n = static_cast<Eigen::Index>(x_.size());
  Eigen::VectorXd ks(n);
  for (Eigen::Index i = 0; i < n; ++i) ks(i) = kernel(x_[static_cast<std::size_t>(i)], x);
  const double mu = ks.dot(alpha_);
  const Eigen::VectorXd v = llt_.matrixL().solve(ks);
  const double var = std::max(hyper_.signal_var - v.squaredNorm(), 0.0);
  return {y_mean_ + y_scale_ * mu, y_scale_ * y_scale_ * var};
}

std::size_t GpSurrogate::best_index() const noexcept {
  return static_cast<std::size_t>(std::min_element(y_.begin(), y_.end()) - y_.begin());
}

GpSurrogate fit_gp(std::vector<std::vector<double>> x, std::vector<double> y, std::uint64_t seed) {
  if (x.size() < 2) fail(Errc::TooFewSamples, "gaussian process fit needs at least 2 observations");
  const std::size_t d = x[0].size();
  // Search in log space: d length-scales, signal variance, noise variance.
  const std::size_t p = d + 2;
  std::vector<double> lo(p), hi(p);
  for (std::size_t i = 0; i < d; ++i) {
    lo[i] = std::log(0.01);
    hi[i] = std::log(10.0);
  }
  lo[d] = std::log(0.01);
  hi[d] = std::log(100.0);
  lo[d + 1] = std::log(kGpNoiseFloor);
  hi[d + 1] = std::log(1.0);

  auto hyper_of = [&](const std::vector<double>& t) {
    GpHyper h;
    h.length_scales.resize(d);
    for (std::size_t i = 0; i < d; ++i) h.length_scales[i] = std::exp(t[i]);
    h.signal_var = std::exp(t[d]);
    h.noise_var = std::exp(t[d + 1]);
    return h;
  };
  auto objective = [&](const std::vector<double>& t) {
    try {
      return GpSurrogate(x, y, hyper_of(t)).log_marginal_likelihood();
    } catch (const Error&) {
      return -kInf;
    }
  };

  constexpr int kRestarts = 8;
  constexpr int kEvals = 60;
  std::vector<double> best_t;
  double best = -kInf;
  for (int r = 0; r < kRestarts; ++r) {
    CounterRng rng(seed, StreamTag::gp_restart, static_cast<std::uint64_t>(r));
    std::vector<double> t(p), step(p);
    for (std::size_t i = 0; i < p; ++i) {
      t[i] = rng.uniform(lo[i], hi[i]);
      step[i] = 0.25 * (hi[i] - lo[i]);
    }
    double f = objective(t);
    int evals = 1;
    for (std::size_t c = 0; evals < kEvals; c = (c + 1) % p) {
      bool moved = false;
      for (double dir : {1.0, -1.0}) {
        if (evals >= kEvals) break;
        auto trial = t;
        trial[c] = std::clamp(t[c] + dir * step[c], lo[c], hi[c]);
        if (trial[c] == t[c]) continue;
        const double ft = objective(trial);
        ++evals;
        if (ft > f) {
          t = std::move(trial);
          f = ft;
          moved = true;
          break;
        }
      }
      if (!moved) step[c] *= 0.5;
      if (std::all_of(step.begin(), step.end(), [](double s) { return s < 1e-6; })) break;
    }
    if (f > best) {
      best = f;
      best_t = t;
    }
  }
  if (best_t.empty() || !std::isfinite(best)) fail(Errc::SingularKernel, "no kernel hyperparameters gave a valid factorization");
  return GpSurrogate(std::move(x), std::move(y), hyper_of(best_t));
}

GpSurrogate fit_gp(const std::vector<Trial>& trials, const ParamSpace& space, std::uint64_t seed) {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (const auto& t : trials) {
    if (!std::isfinite(t.mean_score)) continue;
    x.push_back(encode(t.params, space));
    y.push_back(t.mean_score);
  }
  return fit_gp(std::move(x), std::move(y), seed);
}

double expected_improvement(double mu, double sigma, double best) noexcept {
  if (!(sigma > 0.0)) return std::max(best - mu, 0.0);
  const double z = (best - mu) / sigma;
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return std::max((best - mu) * cdf + sigma * pdf, 0.0);
}

double expected_improvement(const GpSurrogate& gp, std::span<const double> x, double best) {
  const auto [mu, var] = gp.predict(x);
  return expected_improvement(mu, std::sqrt(var), best);
}

std::vector<std::vector<double>> suggest_candidates(const GpSurrogate& gp, std::size_t dims, std::uint64_t seed) {
  std::vector<std::vector<double>> out;
  out.reserve(kSuggestCandidates + kSuggestLocal);
  const ShiftedHalton halton(dims, seed, 1);
  for (std::size_t i = 0; i < kSuggestCandidates; ++i) out.push_back(halton.point(i));
  const auto& center = gp.inputs()[gp.best_index()];
  CounterRng rng(seed, StreamTag::suggest_local, 0);
  for (std::size_t i = 0; i < kSuggestLocal; ++i) {
    std::vector<double> p(dims);
    for (std::size_t j = 0; j < dims; ++j) p[j] = std::clamp(center[j] + kSuggestLocalSigma * rng.normal(), 0.0, 1.0);
    out.push_back(std::move(p));
  }
  return out;
}

Params suggest(const GpSurrogate& gp, const ParamSpace& space, std::uint64_t seed) {
  const auto candidates = suggest_candidates(gp, space.size(), seed);
  const double best = gp.targets()[gp.best_index()];
  std::size_t arg = 0;
  double top = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double ei = expected_improvement(gp, candidates[i], best);
    if (ei > top) {
      top = ei;
      arg = i;
    }
  }
  return decode(candidates[arg], space);
}

void TunerConfig::validate() const {
  if (n_initial < 2) fail(Errc::InvalidConfig, "tuner n_initial must be >= 2");
  if (k_folds < 2) fail(Errc::BadK, "tuner k_folds must be >= 2");
}

TuneResult tune(const Trainer& trainer, const TabularDataset& ds, const ParamSpace& space, const TunerConfig& cfg) {
  cfg.validate();
  return tune(trainer, ds, make_folds(ds.row_count(), cfg.k_folds, cfg.seed), space, cfg);
}

TuneResult tune(const Trainer& trainer, const TabularDataset& ds, const FoldPlan& folds, const ParamSpace& space,
                const TunerConfig& cfg) {
  cfg.validate();
  space.validate();
  if (space.dims.empty()) fail(Errc::InvalidConfig, "search space is empty");

  TuneResult result;
  const ShiftedHalton initial(space.size(), cfg.seed, 0);
  std::uint64_t next_initial = 0;
  auto run_trial = [&](Params params) {
    Trial t;
    try {
      t = cv_objective(trainer, ds, folds, params);
    } catch (const Error& e) {
      t.params = std::move(params);
      t.cv_scores.clear();
      t.mean_score = kInf;
      t.error = e.what();
    }
    t.trial_index = result.history.size();
    result.history.push_back(std::move(t));
  };

  for (std::size_t i = 0; i < cfg.n_initial; ++i) run_trial(decode(initial.point(next_initial++), space));
  for (std::size_t it = 0; it < cfg.n_iterations; ++it) {
    const auto valid = std::count_if(result.history.begin(), result.history.end(),
                                     [](const Trial& t) { return std::isfinite(t.mean_score); });
    if (valid < 2) {
      run_trial(decode(initial.point(next_initial++), space));
      continue;
    }
    const auto gp = fit_gp(result.history, space, stream_key(cfg.seed, static_cast<std::uint64_t>(StreamTag::gp_restart), it));
    run_trial(suggest(gp, space, stream_key(cfg.seed, static_cast<std::uint64_t>(StreamTag::suggest_local), it)));
  }

  result.best = result.history.front();
  for (const auto& t : result.history)
    if (t.mean_score < result.best.mean_score) result.best = t;
  return result;
}

// ---------------------------------------------------------------- JSON

nlohmann::json to_json(const Params& params) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : params) std::visit([&](const auto& x) { j[k] = x; }, v);
  return j;
}

Params params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(Errc::InvalidConfig, "params must be a JSON object");
  Params out;
  for (const auto& [k, v] : j.items()) {
    if (v.is_number_integer()) out[k] = v.get<std::int64_t>();
    else if (v.is_number()) out[k] = v.get<double>();
    else if (v.is_string()) out[k] = v.get<std::string>();
    else if (v.is_boolean()) out[k] = std::string(v.get<bool>() ? "true" : "false");
    else fail(Errc::InvalidConfig, "parameter '" + k + "' has an unsupported type");
  }
  return out;
}

nlohmann::json to_json(const Trial& trial) {
  nlohmann::json j;
  j["trial_index"] = trial.trial_index;
  j["params"] = to_json(trial.params);
  j["cv_scores"] = trial.cv_scores;
  j["mean_score"] = std::isfinite(trial.mean_score) ? nlohmann::json(trial.mean_score) : nlohmann::json("inf");
  if (!trial.error.empty()) j["error"] = trial.error;
  return j;
}

void write_trials_jsonl(const std::filesystem::path& path, const std::vector<Trial>& trials) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::Io, "cannot write '" + path.string() + "'");
  for (const auto& t : trials) out << to_json(t).dump() << '\n';
}

nlohmann::json to_json(const ParamSpace& space) {
  auto arr = nlohmann::json::array();
  for (const auto& dim : space.dims) {
    nlohmann::json j;
    j["name"] = dim.name;
    std::visit(Overloaded{
                   [&](const ContinuousRange& r) { j["type"] = "continuous", j["lo"] = r.lo, j["hi"] = r.hi; },
                   [&](const LogRange& r) { j["type"] = "log_continuous", j["lo"] = r.lo, j["hi"] = r.hi; },
                   [&](const IntegerRange& r) { j["type"] = "integer", j["lo"] = r.lo, j["hi"] = r.hi; },
                   [&](const Choice& c) { j["type"] = "categorical", j["options"] = c.options; },
               },
               dim.domain);
    arr.push_back(std::move(j));
  }
  return arr;
}

ParamSpace param_space_from_json(const nlohmann::json& j) {
  if (!j.is_array()) fail(Errc::InvalidConfig, "search space must be a JSON array");
  ParamSpace space;
  try {
    for (const auto& d : j) {
      Dimension dim;
      dim.name = d.at("name").get<std::string>();
      const auto type = d.at("type").get<std::string>();
      if (type == "continuous") dim.domain = ContinuousRange{d.at("lo").get<double>(), d.at("hi").get<double>()};
      else if (type == "log_continuous" || type == "log") dim.domain = LogRange{d.at("lo").get<double>(), d.at("hi").get<double>()};
      else if (type == "integer") dim.domain = IntegerRange{d.at("lo").get<std::int64_t>(), d.at("hi").get<std::int64_t>()};
      else if (type == "categorical") dim.domain = Choice{d.at("options").get<std::vector<std::string>>()};
      else fail(Errc::InvalidConfig, "unknown dimension type '" + type + "'");
      space.dims.push_back(std::move(dim));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::InvalidConfig, std::string("search space: ") + e.what());
  }
  space.validate();
  return space;
}

// ---------------------------------------------------------------- learners

ParamSpace default_space(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::forest:
      return {{{"n_estimators", IntegerRange{50, 500}},
               {"max_depth", IntegerRange{2, 32}},
               {"unbounded_depth", Choice{{"no", "yes"}}},
               {"max_features", Choice{{"all", "sqrt", "0.5"}}}}};
    case LearnerKind::boosted:
      return {{{"n_rounds", IntegerRange{50, 500}},
               {"learning_rate", LogRange{1e-3, 0.5}},
               {"max_depth", IntegerRange{2, 10}},
               {"l2_leaf", LogRange{1e-2, 10.0}}}};
    case LearnerKind::mlp:
      return {{{"learning_rate", LogRange{1e-4, 1e-2}},
               {"alpha_l2", LogRange{1e-6, 1e-2}},
               {"batch_size", IntegerRange{32, 512}}}};
  }
  return {};
}

namespace {

std::size_t as_count(const ParamValue& v, const std::string& name) {
  const auto i = as_int(v, name);
  if (i < 0) fail(Errc::InvalidConfig, "parameter '" + name + "' must be non-negative");
  return static_cast<std::size_t>(i);
}

std::string as_text(const ParamValue& v, const std::string& name) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  fail(Errc::InvalidConfig, "parameter '" + name + "' must be a string");
}

MaxFeatures parse_max_features(const ParamValue& v, const std::string& name) {
  MaxFeatures mf;
  if (const auto* s = std::get_if<std::string>(&v)) {
    if (*s == "all" || *s == "auto") return mf;
    if (*s == "sqrt") {
      mf.kind = MaxFeatures::Kind::sqrt;
      return mf;
    }
    char* end = nullptr;
    const double f = std::strtod(s->c_str(), &end);
    if (end == s->c_str() || *end != '\0') fail(Errc::InvalidConfig, "bad max_features '" + *s + "'");
    mf.kind = MaxFeatures::Kind::fraction;
    mf.fraction = f;
    return mf;
  }
  mf.kind = MaxFeatures::Kind::fraction;
  mf.fraction = as_real(v, name);
  return mf;
}

}  // namespace

LearnerSpec apply_params(LearnerSpec spec, const Params& params) {
  std::optional<bool> unbounded;
  for (const auto& [name, v] : params) {
    bool known = true;
    switch (spec.kind) {
      case LearnerKind::forest:
        if (name == "n_estimators") spec.forest.n_estimators = as_count(v, name);
        else if (name == "max_depth") spec.forest.max_depth = as_count(v, name);
        else if (name == "unbounded_depth") unbounded = as_text(v, name) == "yes";
        else if (name == "max_features") spec.forest.max_features = parse_max_features(v, name);
        else if (name == "min_leaf") spec.forest.min_leaf = as_count(v, name);
        else if (name == "min_impurity_decrease") spec.forest.min_impurity_decrease = as_real(v, name);
        else known = false;
        break;
      case LearnerKind::boosted:
        if (name == "n_rounds") spec.boosted.n_rounds = as_count(v, name);
        else if (name == "learning_rate") spec.boosted.learning_rate = as_real(v, name);
        else if (name == "max_depth") spec.boosted.max_depth = as_count(v, name);
        else if (name == "l2_leaf") spec.boosted.l2_leaf = as_real(v, name);
        else if (name == "n_bins") spec.boosted.n_bins = as_count(v, name);
        else known = false;
        break;
      case LearnerKind::mlp:
        if (name == "learning_rate") spec.mlp.learning_rate = as_real(v, name);
        else if (name == "alpha_l2") spec.mlp.alpha_l2 = as_real(v, name);
        else if (name == "batch_size") spec.mlp.batch_size = as_count(v, name);
        else if (name == "max_iter") spec.mlp.max_iter = as_count(v, name);
        else known = false;
        break;
    }
    if (!known)
      fail(Errc::InvalidConfig, "unknown " + std::string(learner_name(spec.kind)) + " hyperparameter '" + name + "'");
  }
  if (unbounded && *unbounded) spec.forest.max_depth.reset();
  spec.validate();
  return spec;
}

Trainer make_trainer(const LearnerSpec& base) {
  return [base](const TabularDataset& train, const Params& params) {
    return make_fit_fn(apply_params(base, params))(train);
  };
}

}  // namespace helio
