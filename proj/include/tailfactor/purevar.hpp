#pragma once

// Estimation of the number of factors and the pure-variable partition from a
// TPDM.

#include <cstddef>
#include <vector>

#include "tailfactor/linalg.hpp"
#include "tailfactor/tpdm.hpp"

namespace tailfactor {

struct PureVarResult {
  std::size_t K_hat = 0;
  std::vector<std::size_t> pure;                       // sorted union of the partition
  std::vector<std::vector<std::size_t>> partition;     // each set sorted, 0-based
  double kappa = 0.0;
};

/// Scans j = 0..d-1. With m_j the row maximum and S_j = {l : m_j - S(j,l) <= 2 kappa},
/// j is declared pure when m_l - S(j,l) <= 2 kappa for every l in S_j; S_j then
/// becomes a new set or is merged, together with every set it meets, into the
/// earliest such set.
///
/// Throws StructuralError for a non-square or asymmetric matrix and
/// ParameterError unless kappa is positive. K_hat = 0 is a valid outcome.
PureVarResult pure_var(const Matrix& sigma, double kappa);
PureVarResult pure_var(const Tpdm& tpdm, double kappa);

/// 0.002, 0.0025, ..., 0.008.
std::vector<double> kappa_grid_default();

/// The default grid when `user` is null; otherwise `user` unchanged. Throws
/// ParameterError on an empty or nonpositive user grid.
std::vector<double> kappa_grid(const std::vector<double>* user);

}  // namespace tailfactor
