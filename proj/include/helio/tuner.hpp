// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "helio/dataset.hpp"
#include "helio/learner.hpp"

namespace helio {

struct ContinuousRange {
  double lo = 0.0, hi = 1.0;
};
struct LogRange {
  double lo = 1e-3, hi = 1.0;
};
struct IntegerRange {
  std::int64_t lo = 0, hi = 1;
};
struct Choice {
  std::vector<std::string> options;
};
using Domain = std::variant<ContinuousRange, LogRange, IntegerRange, Choice>;

struct Dimension {
  std::string name;
  Domain domain;
};

struct ParamSpace {
  std::vector<Dimension> dims;

  std::size_t size() const noexcept { return dims.size(); }
  // InvalidConfig unless lo < hi (lo > 0 for log ranges), options non-empty, names unique.
  void validate() const;
};

using ParamValue = std::variant<double, std::int64_t, std::string>;
using Params = std::map<std::string, ParamValue>;

// Unit-cube encoding. encode throws OutOfDomain for missing, mistyped or
// out-of-range values; decode clamps to [0, 1] and rounds integer and
// categorical dimensions.
std::vector<double> encode(const Params& params, const ParamSpace& space);
Params decode(std::span<const double> u, const ParamSpace& space);

struct Trial {
  Params params;
  std::vector<double> cv_scores;
  double mean_score = 0.0;  // +inf for a failed trial
  std::size_t trial_index = 0;
  std::string error;        // empty unless the trial failed
};

using Trainer = std::function<Predictor(const TabularDataset& train, const Params& params)>;

// Fits on all folds but i and scores RMSE on fold i, for every fold.
Trial cv_objective(const Trainer& trainer, const TabularDataset& ds, const FoldPlan& folds, const Params& params);

struct GpHyper {
  std::vector<double> length_scales;
  double signal_var = 1.0;
  double noise_var = 1e-6;
};

inline constexpr double kGpNoiseFloor = 1e-6;

// Matérn-5/2 Gaussian process on unit-cube inputs. Targets are standardized
// internally; predictions are returned in the original units.
class GpSurrogate {
 public:
  GpSurrogate(std::vector<std::vector<double>> x, std::vector<double> y, GpHyper hyper);

  // Posterior mean and variance (original units) at x.
  std::pair<double, double> predict(std::span<const double> x) const;
  double log_marginal_likelihood() const noexcept { return lml_; }
  const GpHyper& hyper() const noexcept { return hyper_; }
  const std::vector<std::vector<double>>& inputs() const noexcept { return x_; }
  const std::vector<double>& targets() const noexcept { return y_; }
  // Observed input with the lowest target (earliest on ties).
  std::size_t best_index() const noexcept;

  double kernel(std::span<const double> a, std::span<const double> b) const noexcept;

 private:
  std::vector<std::vector<double>> x_;
  std::vector<double> y_;
  GpHyper hyper_;
  double y_mean_ = 0.0, y_scale_ = 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
  double lml_ = 0.0;
};

// Chooses hyperparameters by maximizing the log marginal likelihood with a
// multi-start coordinate search (8 restarts x 60 evaluations). Throws
// TooFewSamples below 2 points and SingularKernel when no factorization succeeds.
GpSurrogate fit_gp(std::vector<std::vector<double>> x, std::vector<double> y, std::uint64_t seed);
// Skips failed (non-finite) trials.
GpSurrogate fit_gp(const std::vector<Trial>& trials, const ParamSpace& space, std::uint64_t seed);

// Minimization form: (best - mu) Phi(z) + sigma phi(z), z = (best - mu) / sigma.
double expected_improvement(double mu, double sigma, double best) noexcept;
double expected_improvement(const GpSurrogate& gp, std::span<const double> x, double best);

inline constexpr std::size_t kSuggestCandidates = 2048;
inline constexpr std::size_t kSuggestLocal = 64;
inline constexpr double kSuggestLocalSigma = 0.05;

// Unit-cube candidate set used by suggest: quasi-random points then Gaussian
// perturbations of the best observation.
std::vector<std::vector<double>> suggest_candidates(const GpSurrogate& gp, std::size_t dims, std::uint64_t seed);
// Argmax of EI over the candidates, lowest index on ties.
Params suggest(const GpSurrogate& gp, const ParamSpace& space, std::uint64_t seed);

struct TunerConfig {
  std::size_t n_initial = 10;
  std::size_t n_iterations = 40;
  std::size_t k_folds = 5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TuneResult {
  std::vector<Trial> history;
  Trial best;
};

TuneResult tune(const Trainer& trainer, const TabularDataset& ds, const ParamSpace& space, const TunerConfig& cfg);
// Same, with a caller-supplied fold plan.
TuneResult tune(const Trainer& trainer, const TabularDataset& ds, const FoldPlan& folds, const ParamSpace& space,
                const TunerConfig& cfg);

nlohmann::json to_json(const Params& params);
Params params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Trial& trial);
void write_trials_jsonl(const std::filesystem::path& path, const std::vector<Trial>& trials);

nlohmann::json to_json(const ParamSpace& space);
ParamSpace param_space_from_json(const nlohmann::json& j);

// Shipped search spaces per learner kind.
ParamSpace default_space(LearnerKind kind);
// Overrides the spec's hyperparameters by name; InvalidConfig for unknown names.
LearnerSpec apply_params(LearnerSpec spec, const Params& params);
Trainer make_trainer(const LearnerSpec& base);

}  // namespace helio
