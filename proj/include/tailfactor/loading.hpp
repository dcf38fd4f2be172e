#pragma once

// Loading-matrix estimation: latent moment matrix from the pure sets, Lasso row
// regressions solved by FISTA, OLS refit on the Lasso support, clipping, and
// optional projection onto the unit simplex.

#include <cstddef>
#include <vector>

#include "tailfactor/linalg.hpp"
#include "tailfactor/purevar.hpp"
#include "tailfactor/tpdm.hpp"

namespace tailfactor {

/// Coefficients with |beta| at or below this count as zero when forming the
/// post-Lasso support.
inline constexpr double kSupportThreshold = 1e-10;

struct LspConfig {
  double lambda = 0.0;
  bool use_projection = false;
  std::size_t fista_max_iter = 5000;
  double fista_tol = 1e-8;
  bool post_lasso = true;
};

/// 0.00001, 0.00002, ..., 0.001.
std::vector<double> lambda_grid_default();

struct LatentTargets {
  Matrix C;      // K x K, averages of the TPDM over pairs of pure sets
  Matrix theta;  // d x K, row j averages column j of the TPDM over each pure set
};

/// Throws StructuralError for an empty partition, an empty set, or an index out
/// of range.
LatentTargets estimate_c(const Matrix& sigma, const PureVarResult& purevar);

struct FistaResult {
  Vector beta;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> objective;  // after each iteration; filled when requested
};

/// Minimizes 0.5 |C b - theta|_2^2 + lambda |b|_1 from b = 0 with step
/// 1/|C|_2^2 and monotone momentum (restarted whenever a step does not
/// descend). Stops once the proximal-gradient residual in the max norm falls
/// below tol * max(1, |C^T theta|_inf).
FistaResult fista_lasso(const Matrix& C, const Vector& theta, double lambda,
                        std::size_t max_iter = 5000, double tol = 1e-8,
                        bool record_objective = false);

double lasso_objective(const Matrix& C, const Vector& theta, double lambda, const Vector& beta);

struct OlsResult {
  Vector beta;
  bool singular = false;
  bool empty_support = false;
};

/// Solves the system restricted to `support` (minimum-norm solution when the
/// principal submatrix is singular); zero elsewhere.
OlsResult ols_post_lasso(const Matrix& C, const Vector& theta,
                         const std::vector<std::size_t>& support);

/// Euclidean projection onto {b >= 0, sum b = 1} by sort-and-threshold. Inputs
/// already on the simplex (to 1e-12) are returned unchanged.
Vector simplex_project(const Vector& v);

struct LoadingEstimate {
  Matrix matrix;                          // d x K_hat
  std::vector<std::size_t> support_sizes; // nonzeros per row of `matrix`
  std::vector<bool> pure_row;
  std::vector<std::size_t> empty_support_rows;
  std::vector<std::size_t> singular_rows;
  std::vector<std::size_t> unconverged_rows;
  LspConfig config;

  std::size_t d() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
  std::size_t K() const noexcept { return static_cast<std::size_t>(matrix.cols()); }
};

/// Pure rows become unit vectors; every other row is FISTA, then (optionally)
/// the OLS refit on the FISTA support, then max(., 0), then (optionally) the
/// simplex projection of its nonzero coordinates. Throws EstimationError when
/// K_hat = 0.
LoadingEstimate lsp(const Matrix& sigma, const PureVarResult& purevar, const LspConfig& config);
LoadingEstimate lsp(const Tpdm& tpdm, const PureVarResult& purevar, const LspConfig& config);

}  // namespace tailfactor
