#pragma once

// Univariate peaks-over-threshold: generalized Pareto CDF and likelihood,
// profile maximum-likelihood fitting, and the semiparametric tail estimator.

#include <cstddef>
#include <span>
#include <vector>

namespace tailfactor {

/// Shapes closer to zero than this use the exponential form.
inline constexpr double kGpdExponentialBand = 1e-9;
/// Fits are restricted to xi above this value.
inline constexpr double kGpdMinShape = -0.5;
inline constexpr std::size_t kGpdMinExcesses = 10;

struct GpdFit {
  double xi = 0.0;
  double sigma = 1.0;
  double threshold = 0.0;
  std::size_t k = 0;               // exceedance count used for the k/n factor
  std::size_t n = 0;
  std::size_t excess_count = 0;    // strictly positive excesses actually fitted
  bool converged = false;
};

/// 1 - (1 + xi y / sigma)_+^(-1/xi), or 1 - exp(-y / sigma) near xi = 0.
double gpd_cdf(double y, double xi, double sigma);

/// Log-likelihood of positive excesses; -inf outside the support.
double gpd_loglik(std::span<const double> excesses, double xi, double sigma);

/// Profile-likelihood MLE over eta = xi / sigma with xi > -0.5. Fills xi,
/// sigma, excess_count and converged only. Throws EstimationError for fewer
/// than 10 excesses and InputError for a nonpositive one.
GpdFit gpd_mle(std::span<const double> excesses);

/// Empirical CDF with the (n+1) denominator.
class Ecdf {
 public:
  explicit Ecdf(std::vector<double> values);

  /// #{i : x_i <= x} / (n + 1)
  double operator()(double x) const;
  std::size_t n() const noexcept { return sorted_.size(); }
  const std::vector<double>& sorted() const noexcept { return sorted_; }

 private:
  std::vector<double> sorted_;
};

/// 1 - F_n(x) for x <= threshold, (k/n)(1 - G(x - threshold)) above.
double tail_prob(double x, const GpdFit& fit, const Ecdf& ecdf);

/// x above the threshold with (k/n)(1 - G(x - threshold)) = p.
double gpd_return_level(double p, const GpdFit& fit);

struct FitMarginResult {
  GpdFit fit;
  std::size_t dropped_ties = 0;  // zero excesses removed before fitting
};

/// Threshold at the (n-k)-th order statistic; fits the top-k excesses with
/// zero excesses from ties dropped. Throws ParameterError unless 10 <= k < n.
FitMarginResult fit_margin(std::span<const double> column, std::size_t k);

}  // namespace tailfactor
