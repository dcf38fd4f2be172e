// Compiled with -mavx2 (no FMA contraction, so products round exactly like the
// scalar reference). Only reached after a runtime CPU check.

#include "tailfactor/simd/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__)

#include <immintrin.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace tailfactor::simd {
namespace {

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

inline double hmax(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
}

inline double hmin(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return std::min(std::min(lanes[0], lanes[1]), std::min(lanes[2], lanes[3]));
}

double max_abs(const double* x, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, abs_pd(_mm256_loadu_pd(x + i)));
  double r = hmax(m);
  for (; i < n; ++i) r = std::max(r, std::abs(x[i]));
  return r;
}

double sum_abs(const double* x, std::size_t n) {
  __m256d s = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) s = _mm256_add_pd(s, abs_pd(_mm256_loadu_pd(x + i)));
  double r = hsum(s);
  for (; i < n; ++i) r += std::abs(x[i]);
  return r;
}

double sum_squares(const double* x, std::size_t n) {
  __m256d s = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    s = _mm256_add_pd(s, _mm256_mul_pd(v, v));
  }
  double r = hsum(s);
  for (; i < n; ++i) r += x[i] * x[i];
  return r;
}

double weighted_sum_abs(const double* w, const double* x, std::size_t n) {
  __m256d s = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s = _mm256_add_pd(
        s, _mm256_mul_pd(_mm256_loadu_pd(w + i), abs_pd(_mm256_loadu_pd(x + i))));
  }
  double r = hsum(s);
  for (; i < n; ++i) r += w[i] * std::abs(x[i]);
  return r;
}

double max_value(const double* x, std::size_t n) {
  __m256d m = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_loadu_pd(x + i));
  double r = hmax(m);
  for (; i < n; ++i) r = std::max(r, x[i]);
  return r;
}

double min_value(const double* x, std::size_t n) {
  __m256d m = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_min_pd(m, _mm256_loadu_pd(x + i));
  double r = hmin(m);
  for (; i < n; ++i) r = std::min(r, x[i]);
  return r;
}

void outer_upper_accumulate(const double* y, std::size_t d, double scale,
                            double* out) {
  for (std::size_t a = 0; a < d; ++a) {
    const double t = scale * y[a];
    const __m256d tv = _mm256_set1_pd(t);
    double* row = out + a * d;
    std::size_t b = a;
    for (; b + 4 <= d; b += 4) {
      const __m256d prod = _mm256_mul_pd(tv, _mm256_loadu_pd(y + b));
      _mm256_storeu_pd(row + b, _mm256_add_pd(_mm256_loadu_pd(row + b), prod));
    }
    for (; b < d; ++b) row[b] += t * y[b];
  }
}

void pairwise_min_upper_accumulate(const double* u, std::size_t d, double w,
                                   double* out) {
  const __m256d wv = _mm256_set1_pd(w);
  for (std::size_t a = 0; a < d; ++a) {
    const double ua = u[a];
    const __m256d uav = _mm256_set1_pd(ua);
    double* row = out + a * d;
    std::size_t b = a;
    for (; b + 4 <= d; b += 4) {
      // min(ua, ub) with the scalar tie rule: picks ub only when ub < ua.
      const __m256d ub = _mm256_loadu_pd(u + b);
      const __m256d lt = _mm256_cmp_pd(ub, uav, _CMP_LT_OQ);
      const __m256d mn = _mm256_blendv_pd(uav, ub, lt);
      _mm256_storeu_pd(row + b,
                       _mm256_add_pd(_mm256_loadu_pd(row + b), _mm256_mul_pd(wv, mn)));
    }
    for (; b < d; ++b) row[b] += w * std::min(ua, u[b]);
  }
}

// Four rows at a time, each accumulated left to right so the rounding matches
// the scalar dot product.
void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x,
            double* out) {
  std::size_t r = 0;
  const auto stride = static_cast<long long>(cols);
  const __m256i offsets = _mm256_set_epi64x(3 * stride, 2 * stride, stride, 0);
  for (; r + 4 <= rows; r += 4) {
    __m256d s = _mm256_setzero_pd();
    const double* base = a + r * cols;
    for (std::size_t c = 0; c < cols; ++c) {
      const __m256d col = _mm256_i64gather_pd(base + c, offsets, 8);
      s = _mm256_add_pd(s, _mm256_mul_pd(col, _mm256_set1_pd(x[c])));
    }
    _mm256_storeu_pd(out + r, s);
  }
  for (; r < rows; ++r) {
    const double* row = a + r * cols;
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += row[c] * x[c];
    out[r] = s;
  }
}

void multiply_inplace(double* out, const double* s, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i,
                     _mm256_mul_pd(_mm256_loadu_pd(out + i), _mm256_loadu_pd(s + i)));
  }
  for (; i < n; ++i) out[i] *= s[i];
}

// Nibble-table popcount (vpshufb) with byte sums folded by vpsadbw.
std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b,
                           std::size_t words) {
  const __m256i lookup =
      _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4, 0, 1, 1, 2, 1,
                       2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= words; i += 4) {
    const __m256i v = _mm256_and_si256(
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i)),
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i)));
    const __m256i lo = _mm256_and_si256(v, low_mask);
    const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
    const __m256i cnt = _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo),
                                        _mm256_shuffle_epi8(lookup, hi));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(cnt, _mm256_setzero_si256()));
  }
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  std::uint64_t total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < words; ++i) total += static_cast<std::uint64_t>(std::popcount(a[i] & b[i]));
  return total;
}

}  // namespace

namespace detail {
const KernelTable& avx2_table() noexcept {
  static const KernelTable table{
      Isa::Avx2,        max_abs,   sum_abs,
      sum_squares,      weighted_sum_abs,
      max_value,        min_value, outer_upper_accumulate,
      pairwise_min_upper_accumulate,
      matvec,           multiply_inplace,
      and_popcount,
  };
  return table;
}
}  // namespace detail

}  // namespace tailfactor::simd

#endif
