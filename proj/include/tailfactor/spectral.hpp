#pragma once

// Aggregation of pseudo-observations over the pure sets and the empirical
// estimator of the latent spectral measure.

#include <cstddef>

#include "tailfactor/linalg.hpp"
#include "tailfactor/purevar.hpp"
#include "tailfactor/spectral_sample.hpp"
#include "tailfactor/tpdm.hpp"

namespace tailfactor {

struct AggregatedObservations {
  Matrix z_values;  // n x K_hat, column a averages the pseudo-observations over set a
  Vector radii;     // 1-norm of each row

  std::size_t n() const noexcept { return static_cast<std::size_t>(z_values.rows()); }
  std::size_t K() const noexcept { return static_cast<std::size_t>(z_values.cols()); }
};

/// Throws StructuralError on an empty partition or an out-of-range index.
AggregatedObservations aggregate(const PseudoObservations& pseudo,
                                 const PureVarResult& purevar);

/// Rows with radius strictly above the (n-k')-th order statistic, normalized
/// to the simplex, each with mass 1/k'. Throws ParameterError unless
/// 1 <= k' < n.
SpectralSample empirical_psi(const AggregatedObservations& agg, std::size_t k_prime);

}  // namespace tailfactor
