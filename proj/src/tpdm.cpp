#include "tailfactor/tpdm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "tailfactor/error.hpp"
#include "tailfactor/simd/kernels.hpp"

namespace tailfactor {

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 2) throw ParameterError("data needs at least two observations");
  if (values_.cols() < 1) throw StructuralError("data has no columns");
  if (!values_.allFinite()) {
    for (Eigen::Index i = 0; i < values_.rows(); ++i)
      for (Eigen::Index j = 0; j < values_.cols(); ++j)
        if (!std::isfinite(values_(i, j)))
          throw InputError("non-finite value at row " + std::to_string(i) + ", column " +
                           std::to_string(j));
  }
}

std::vector<double> DataMatrix::column(std::size_t j) const {
  const auto c = values_.col(static_cast<Eigen::Index>(j));
  return {c.begin(), c.end()};
}

namespace {

// Ranks one column; returns true if any two values tie.
bool rank_column(const Matrix& values, Eigen::Index j, IndexMatrix& ranks,
                 std::vector<Eigen::Index>& order) {
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return values(a, j) < values(b, j);
  });
  bool tied = false;
  for (std::size_t r = 0; r < order.size(); ++r) {
    ranks(order[r], j) = static_cast<std::int64_t>(r + 1);
    if (r > 0 && values(order[r], j) == values(order[r - 1], j)) tied = true;
  }
  return tied;
}

}  // namespace

IndexMatrix ordinal_ranks(const Matrix& values) {
  IndexMatrix ranks(values.rows(), values.cols());
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.rows()));
  for (Eigen::Index j = 0; j < values.cols(); ++j) rank_column(values, j, ranks, order);
  return ranks;
}

PseudoObservations pseudo_pareto(const DataMatrix& data) {
  const Matrix& x = data.values();
  PseudoObservations out;
  out.ranks.resize(x.rows(), x.cols());
  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    if (rank_column(x, j, out.ranks, order))
      out.tied_columns.push_back(static_cast<std::size_t>(j));

  const double n1 = static_cast<double>(x.rows()) + 1.0;
  out.values.resize(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      out.values(i, j) = n1 / (n1 - static_cast<double>(out.ranks(i, j)));
  return out;
}

Tpdm empirical_tpdm(const PseudoObservations& pseudo, std::size_t k, const Norm& norm) {
  const std::size_t n = pseudo.n();
  const std::size_t d = pseudo.d();
  if (k == 0 || k >= n)
    throw ParameterError("TPDM threshold count k must satisfy 1 <= k < n (k = " +
                         std::to_string(k) + ", n = " + std::to_string(n) + ")");
  std::vector<double> radii(n);
  for (std::size_t i = 0; i < n; ++i)
    radii[i] = norm(row_span(pseudo.values, static_cast<Eigen::Index>(i)));
  std::vector<double> sorted = radii;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n - k - 1),
                   sorted.end());
  const double threshold = sorted[n - k - 1];

  const auto& kt = simd::kernels();
  Tpdm out;
  out.norm = norm;
  out.k = k;
  out.matrix = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    if (!(radii[i] > threshold)) continue;
    ++out.effective_count;
    kt.outer_upper_accumulate(pseudo.values.data() + i * d, d,
                              1.0 / (radii[i] * radii[i]), out.matrix.data());
  }
  out.matrix /= static_cast<double>(k);
  out.matrix.triangularView<Eigen::StrictlyLower>() = out.matrix.transpose();
  return out;
}

Matrix empirical_chi(const IndexMatrix& ranks, std::size_t k_prime) {
  const auto n = static_cast<std::size_t>(ranks.rows());
  const auto d = static_cast<std::size_t>(ranks.cols());
  if (k_prime == 0 || k_prime >= n)
    throw ParameterError("tail correlation threshold k' must satisfy 1 <= k' < n");
  const std::size_t words = (n + 63) / 64;
  const auto cut = static_cast<std::int64_t>(n - k_prime);
  std::vector<std::uint64_t> bits(words * d, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (ranks(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > cut)
        bits[j * words + i / 64] |= std::uint64_t{1} << (i % 64);

  const auto& kt = simd::kernels();
  const double scale = 1.0 / static_cast<double>(k_prime);
  Matrix chi(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j) {
    chi(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = 1.0;
    for (std::size_t l = j + 1; l < d; ++l) {
      const double c = static_cast<double>(
                           kt.and_popcount(&bits[j * words], &bits[l * words], words)) *
                       scale;
      chi(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = c;
      chi(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) = c;
    }
  }
  return chi;
}

Matrix empirical_chi(const DataMatrix& data, std::size_t k_prime) {
  return empirical_chi(ordinal_ranks(data.values()), k_prime);
}

}  // namespace tailfactor
