#pragma once

// Plug-in estimation of joint tail probabilities, model-implied tail
// correlations, hyperparameter selection, lower-tail transforms, and basic
// bootstrap intervals.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tailfactor/family.hpp"
#include "tailfactor/linalg.hpp"
#include "tailfactor/loading.hpp"
#include "tailfactor/marginal.hpp"
#include "tailfactor/norm.hpp"
#include "tailfactor/purevar.hpp"
#include "tailfactor/spectral.hpp"
#include "tailfactor/spectral_sample.hpp"
#include "tailfactor/tpdm.hpp"

namespace tailfactor {

inline constexpr double kAdequateRSquared = 0.8;

/// Selected tuning parameters.
struct TuningChoice {
  double kappa = 0.0;
  double lambda = 0.0;
  bool projection = false;
};

/// One row of the hyperparameter search table.
struct TuningScore {
  TuningChoice choice;
  std::size_t K_hat = 0;
  std::optional<double> r_squared;  // nullopt when the configuration was skipped
};

/// Per-coordinate tail model: GPD above the threshold, empirical CDF below.
struct MarginModel {
  GpdFit fit;
  Ecdf ecdf;
  std::size_t dropped_ties = 0;

  double tail_prob(double x) const { return tailfactor::tail_prob(x, fit, ecdf); }
};

struct FittedTailModel {
  std::size_t K_hat = 0;
  PureVarResult purevar;
  LoadingEstimate loading;
  SpectralSample psi_hat;  // raw masses 1/k'
  std::vector<MarginModel> margins;
  TuningChoice config;
  double r_squared = 0.0;
  bool adequate = false;
  std::size_t k = 0;
  std::size_t k_prime = 0;
  Norm norm = Norm::max();

  std::size_t d() const noexcept { return loading.d(); }
};

struct ProbabilityEstimate {
  double p = 0.0;    // clipped to [0, 1]
  double raw = 0.0;
  bool clipped = false;
};

/// K sum_i w_i max_J min_{j in J} (A_j . z_i) q_j over the atoms of `psi`.
ProbabilityEstimate estimate_p(const Matrix& loading, const SpectralSample& psi,
                               std::span<const double> tail_probs,
                               const SubsetFamily& family);

/// Same, with q_j = margin j's tail probability at x_j. Throws EstimationError
/// when K_hat = 0 and StructuralError on a length mismatch.
ProbabilityEstimate estimate_p(const FittedTailModel& model, std::span<const double> x,
                               const SubsetFamily& family);

/// min{1, K sum_i w_i min(A_j . z_i, A_l . z_i)}, symmetric d x d.
Matrix model_chi(const Matrix& loading, const SpectralSample& psi);

/// Coefficient of determination over unordered off-diagonal pairs with the
/// empirical matrix as response. nullopt when it has zero variance.
std::optional<double> r_squared(const Matrix& chi_model, const Matrix& chi_emp);

struct SelectionSettings {
  std::size_t k = 0;
  std::size_t k_prime = 0;
  Norm norm = Norm::max();
  std::vector<double> kappa_grid;   // empty: default grid
  std::vector<double> lambda_grid;  // empty: default grid
  std::vector<bool> projection = {false, true};
  LspConfig lsp;                    // lambda and use_projection are overridden
};

struct SelectionResult {
  FittedTailModel model;  // margins left empty
  std::vector<TuningScore> table;
};

/// Evaluates every (kappa, lambda, projection) configuration, kappa outermost,
/// and keeps the first one with the largest R^2. Configurations with K_hat = 0
/// or an undefined R^2 are skipped; throws EstimationError if all are.
SelectionResult select_hyperparameters(const DataMatrix& data,
                                       const SelectionSettings& settings);

/// Elementwise reciprocal; throws InputError on a nonpositive entry.
DataMatrix lower_tail_transform(const DataMatrix& data);
std::vector<double> lower_tail_thresholds(std::span<const double> w);

/// (1/n) #{i : the set of coordinates with X_ij > x_j contains a member of
/// the family}.
double empirical_p(const DataMatrix& data, std::span<const double> x,
                   const SubsetFamily& family);

struct BootstrapCi {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  std::size_t replicates = 0;
  std::size_t failed = 0;
};

/// [max(0, 2 p - q_hi), min(1, 2 p - q_lo)], with both ends clamped to [0, 1].
std::pair<double, double> basic_interval(double point, double q_lo, double q_hi);

/// sorted[ceil(q * B) - 1]
double order_statistic_quantile(const std::vector<double>& sorted, double q);

using Estimator = std::function<double(const DataMatrix&)>;

/// Resamples rows with replacement; replicate b draws from derive_seed(seed, b).
/// Replicates whose estimator throws are skipped; throws EstimationError when
/// fewer than 90% succeed.
BootstrapCi bootstrap_ci(const DataMatrix& data, const Estimator& estimator,
                         std::size_t replicates, double beta, std::uint64_t seed);

using VectorEstimator = std::function<std::vector<double>(const DataMatrix&)>;

/// Several statistics from one set of replicates; a replicate counts as failed
/// when the estimator throws.
std::vector<BootstrapCi> bootstrap_ci_vector(const DataMatrix& data,
                                             const VectorEstimator& estimator,
                                             std::size_t replicates, double beta,
                                             std::uint64_t seed);

DataMatrix resample_rows(const DataMatrix& data, std::uint64_t seed);

}  // namespace tailfactor
