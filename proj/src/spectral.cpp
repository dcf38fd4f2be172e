#include "tailfactor/spectral.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "tailfactor/error.hpp"
#include "tailfactor/simd/kernels.hpp"

namespace tailfactor {

AggregatedObservations aggregate(const PseudoObservations& pseudo,
                                 const PureVarResult& purevar) {
  const auto& sets = purevar.partition;
  if (sets.empty()) throw StructuralError("partition is empty");
  const auto n = pseudo.values.rows();
  const auto d = pseudo.values.cols();
  for (const auto& s : sets) {
    if (s.empty()) throw StructuralError("partition contains an empty set");
    for (std::size_t j : s)
      if (static_cast<Eigen::Index>(j) >= d)
        throw StructuralError("partition index " + std::to_string(j) + " out of range");
  }
  const auto k = static_cast<Eigen::Index>(sets.size());
  const auto& kt = simd::kernels();
  AggregatedObservations out;
  out.z_values.resize(n, k);
  out.radii.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index a = 0; a < k; ++a) {
      const auto& s = sets[static_cast<std::size_t>(a)];
      double total = 0.0;
      for (std::size_t j : s) total += pseudo.values(i, static_cast<Eigen::Index>(j));
      out.z_values(i, a) = total / static_cast<double>(s.size());
    }
    out.radii(i) = kt.sum_abs(out.z_values.data() + i * k, static_cast<std::size_t>(k));
  }
  return out;
}

SpectralSample empirical_psi(const AggregatedObservations& agg, std::size_t k_prime) {
  const std::size_t n = agg.n();
  if (k_prime == 0 || k_prime >= n)
    throw ParameterError("spectral threshold k' must satisfy 1 <= k' < n (k' = " +
                         std::to_string(k_prime) + ", n = " + std::to_string(n) + ")");
  std::vector<double> sorted(agg.radii.data(), agg.radii.data() + n);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n - k_prime - 1),
                   sorted.end());
  const double threshold = sorted[n - k_prime - 1];

  std::vector<Eigen::Index> selected;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i)
    if (agg.radii(i) > threshold) selected.push_back(i);

  SpectralSample out;
  out.k_prime = k_prime;
  out.effective_count = selected.size();
  out.atoms.resize(static_cast<Eigen::Index>(selected.size()), agg.z_values.cols());
  for (std::size_t r = 0; r < selected.size(); ++r)
    out.atoms.row(static_cast<Eigen::Index>(r)) =
        agg.z_values.row(selected[r]) / agg.radii(selected[r]);
  out.weights = Vector::Constant(static_cast<Eigen::Index>(selected.size()),
                                 1.0 / static_cast<double>(k_prime));
  return out;
}

}  // namespace tailfactor
