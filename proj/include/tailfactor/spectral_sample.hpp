#pragma once

#include <cstddef>

#include "tailfactor/linalg.hpp"

namespace tailfactor {

/// Weighted atoms representing a spectral measure or an estimate of one.
///
/// `weights` are the raw masses. For the empirical estimator these are 1/k'
/// each and may sum to less than one when radii tie at the threshold; samples
/// drawn from a model always sum to one.
struct SpectralSample {
  Matrix atoms;  // one atom per row
  Vector weights;
  std::size_t k_prime = 0;
  std::size_t effective_count = 0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(atoms.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(atoms.cols()); }

  double total_mass() const { return weights.sum(); }
  /// Weights rescaled to a probability vector.
  Vector normalized_weights() const;
  /// Mean of the atoms under the normalized weights.
  Vector weighted_mean() const;
  /// sum_i w_i x_i x_i^T under the raw weights.
  Matrix second_moment() const;
};

}  // namespace tailfactor
