#pragma once

// Rank-based standardization to Pareto margins, the empirical tail pairwise
// dependence matrix, and empirical pairwise tail correlations.

#include <cstddef>
#include <string>
#include <vector>

#include "tailfactor/linalg.hpp"
#include "tailfactor/norm.hpp"

namespace tailfactor {

/// n x d table of finite observations, one row per observation.
class DataMatrix {
 public:
  /// Throws InputError on non-finite entries and ParameterError when n < 2.
  explicit DataMatrix(Matrix values);

  const Matrix& values() const noexcept { return values_; }
  std::size_t n() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t d() const noexcept { return static_cast<std::size_t>(values_.cols()); }

  std::vector<double> column(std::size_t j) const;

 private:
  Matrix values_;
};

/// Pseudo-observations (n+1)/(n+1-R_ij) built from within-column ranks.
struct PseudoObservations {
  Matrix values;      // n x d, entries in (1, n+1]
  IndexMatrix ranks;  // n x d, each column a permutation of 1..n
  std::vector<std::size_t> tied_columns;  // columns where the tie rule was used

  std::size_t n() const noexcept { return static_cast<std::size_t>(values.rows()); }
  std::size_t d() const noexcept { return static_cast<std::size_t>(values.cols()); }
};

/// Tail pairwise dependence matrix together with how it was obtained. For
/// population (oracle) matrices k and effective_count are zero.
struct Tpdm {
  Matrix matrix;
  Norm norm = Norm::max();
  std::size_t k = 0;
  std::size_t effective_count = 0;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
};

/// Ordinal ranks per column: ties go to the earlier row first.
IndexMatrix ordinal_ranks(const Matrix& values);

/// F_nj(x) = (n+1)^{-1} #{i : X_ij <= x}; Y_ij = 1 / (1 - F_nj(X_ij)).
PseudoObservations pseudo_pareto(const DataMatrix& data);

/// (1/k) sum over rows with radius strictly above the (n-k)-th order statistic
/// of Y_i Y_i^T / |Y_i|^2. Requires 1 <= k < n.
Tpdm empirical_tpdm(const PseudoObservations& pseudo, std::size_t k,
                    const Norm& norm = Norm::max());

/// chi(j,l) = (1/k') #{i : R_ij > n-k', R_il > n-k'}, unit diagonal.
Matrix empirical_chi(const DataMatrix& data, std::size_t k_prime);

/// Same as above from precomputed ranks.
Matrix empirical_chi(const IndexMatrix& ranks, std::size_t k_prime);

}  // namespace tailfactor
