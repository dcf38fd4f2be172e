#include "tailfactor/simd/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace tailfactor::simd {
namespace {

double max_abs(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
  return m;
}

double sum_abs(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::abs(x[i]);
  return s;
}

double sum_squares(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

double weighted_sum_abs(const double* w, const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * std::abs(x[i]);
  return s;
}

double max_value(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

double min_value(const double* x, std::size_t n) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::min(m, x[i]);
  return m;
}

void outer_upper_accumulate(const double* y, std::size_t d, double scale,
                            double* out) {
  for (std::size_t a = 0; a < d; ++a) {
    const double t = scale * y[a];
    double* row = out + a * d;
    for (std::size_t b = a; b < d; ++b) row[b] += t * y[b];
  }
}

void pairwise_min_upper_accumulate(const double* u, std::size_t d, double w,
                                   double* out) {
  for (std::size_t a = 0; a < d; ++a) {
    const double ua = u[a];
    double* row = out + a * d;
    for (std::size_t b = a; b < d; ++b) row[b] += w * std::min(ua, u[b]);
  }
}

void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x,
            double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a + r * cols;
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += row[c] * x[c];
    out[r] = s;
  }
}

void multiply_inplace(double* out, const double* s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] *= s[i];
}

std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b,
                           std::size_t words) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < words; ++i)
    total += static_cast<std::uint64_t>(std::popcount(a[i] & b[i]));
  return total;
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{
      Isa::Scalar,      max_abs,   sum_abs,
      sum_squares,      weighted_sum_abs,
      max_value,        min_value, outer_upper_accumulate,
      pairwise_min_upper_accumulate,
      matvec,           multiply_inplace,
      and_popcount,
  };
  return table;
}

}  // namespace tailfactor::simd
