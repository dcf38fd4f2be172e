#pragma once

// Data-parallel inner loops used by the estimators.
//
// Every kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2 variant. The table is picked once at first use from the CPU
// capabilities; setting TAILFACTOR_SIMD=scalar in the environment forces the
// reference path.
//
// Elementwise kernels (outer-product and pairwise-min accumulation, max/min
// reductions, popcounts) produce bit-identical results on both paths. Sum
// reductions (1-norm, squared 2-norm, dot products) reassociate and agree to
// rounding only.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace tailfactor::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
  Isa isa;

  double (*max_abs)(const double* x, std::size_t n);
  double (*sum_abs)(const double* x, std::size_t n);
  double (*sum_squares)(const double* x, std::size_t n);
  double (*weighted_sum_abs)(const double* w, const double* x, std::size_t n);
  double (*max_value)(const double* x, std::size_t n);
  double (*min_value)(const double* x, std::size_t n);

  /// out[a*d + b] += (scale * y[a]) * y[b] for b >= a. Lower triangle untouched.
  void (*outer_upper_accumulate)(const double* y, std::size_t d, double scale,
                                 double* out);

  /// out[a*d + b] += w * min(u[a], u[b]) for b >= a.
  void (*pairwise_min_upper_accumulate)(const double* u, std::size_t d, double w,
                                        double* out);

  /// out = A x with A row-major rows x cols.
  void (*matvec)(const double* a, std::size_t rows, std::size_t cols,
                 const double* x, double* out);

  /// out[i] *= s[i]
  void (*multiply_inplace)(double* out, const double* s, std::size_t n);

  /// popcount(a & b) over `words` 64-bit words.
  std::uint64_t (*and_popcount)(const std::uint64_t* a, const std::uint64_t* b,
                                std::size_t words);
};

const KernelTable& scalar_kernels() noexcept;

/// nullptr when the binary or the CPU lacks AVX2.
const KernelTable* avx2_kernels() noexcept;

/// The table selected for this process.
const KernelTable& kernels() noexcept;

}  // namespace tailfactor::simd
