#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "tailfactor/simd/kernels.hpp"

namespace simd = tailfactor::simd;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, bool signed_values) {
  std::uniform_real_distribution<double> u(signed_values ? -3.0 : 0.0, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    avx = simd::avx2_kernels();
    if (!avx) GTEST_SKIP() << "AVX2 kernels unavailable on this machine";
  }
  const simd::KernelTable& ref = simd::scalar_kernels();
  const simd::KernelTable* avx = nullptr;
};

}  // namespace

TEST(Kernels, ScalarReductions) {
  const auto& k = simd::scalar_kernels();
  const std::vector<double> x = {1.0, -4.0, 2.5};
  EXPECT_EQ(k.max_abs(x.data(), 3), 4.0);
  EXPECT_EQ(k.sum_abs(x.data(), 3), 7.5);
  EXPECT_EQ(k.sum_squares(x.data(), 3), 1.0 + 16.0 + 6.25);
  EXPECT_EQ(k.max_value(x.data(), 3), 2.5);
  EXPECT_EQ(k.min_value(x.data(), 3), -4.0);
  const std::vector<double> w = {2.0, 1.0, 0.0};
  EXPECT_EQ(k.weighted_sum_abs(w.data(), x.data(), 3), 6.0);
}

TEST(Kernels, ScalarMatvecAndOuter) {
  const auto& k = simd::scalar_kernels();
  const std::vector<double> a = {1, 2, 3, 4, 5, 6};  // 2 x 3
  const std::vector<double> x = {1, 0, -1};
  std::vector<double> out(2);
  k.matvec(a.data(), 2, 3, x.data(), out.data());
  EXPECT_EQ(out[0], -2.0);
  EXPECT_EQ(out[1], -2.0);

  const std::vector<double> y = {1.0, 2.0};
  std::vector<double> m(4, 0.0);
  k.outer_upper_accumulate(y.data(), 2, 0.5, m.data());
  EXPECT_EQ(m[0], 0.5);
  EXPECT_EQ(m[1], 1.0);
  EXPECT_EQ(m[2], 0.0);  // lower triangle untouched
  EXPECT_EQ(m[3], 2.0);

  std::vector<double> p(4, 0.0);
  k.pairwise_min_upper_accumulate(y.data(), 2, 2.0, p.data());
  EXPECT_EQ(p[0], 2.0);
  EXPECT_EQ(p[1], 2.0);
  EXPECT_EQ(p[3], 4.0);
}

TEST(Kernels, ActiveTableHonoursOverride) {
  const char* env = std::getenv("TAILFACTOR_SIMD");
  if (env && std::string(env) == "scalar") {
    EXPECT_EQ(simd::kernels().isa, simd::Isa::Scalar);
  } else if (simd::avx2_kernels()) {
    EXPECT_EQ(simd::kernels().isa, simd::Isa::Avx2);
  }
}

TEST_F(KernelEquivalence, ElementwiseKernelsBitIdentical) {
  std::mt19937_64 rng(42);
  for (std::size_t n : {0, 1, 3, 4, 5, 7, 8, 15, 16, 17, 33, 100}) {
    const auto x = random_vector(rng, n, true);
    EXPECT_EQ(ref.max_abs(x.data(), n), avx->max_abs(x.data(), n)) << n;
    if (n > 0) {
      EXPECT_EQ(ref.max_value(x.data(), n), avx->max_value(x.data(), n)) << n;
      EXPECT_EQ(ref.min_value(x.data(), n), avx->min_value(x.data(), n)) << n;
    }

    const auto y = random_vector(rng, n, false);
    std::vector<double> o1(n * n, 0.25), o2(n * n, 0.25);
    ref.outer_upper_accumulate(y.data(), n, 0.3, o1.data());
    avx->outer_upper_accumulate(y.data(), n, 0.3, o2.data());
    EXPECT_EQ(o1, o2) << n;

    std::vector<double> p1(n * n, 0.0), p2(n * n, 0.0);
    ref.pairwise_min_upper_accumulate(y.data(), n, 0.7, p1.data());
    avx->pairwise_min_upper_accumulate(y.data(), n, 0.7, p2.data());
    EXPECT_EQ(p1, p2) << n;

    auto m1 = random_vector(rng, n, true), m2 = m1;
    ref.multiply_inplace(m1.data(), y.data(), n);
    avx->multiply_inplace(m2.data(), y.data(), n);
    EXPECT_EQ(m1, m2) << n;
  }
}

TEST_F(KernelEquivalence, MatvecBitIdentical) {
  std::mt19937_64 rng(7);
  for (std::size_t rows : {1, 3, 30})
    for (std::size_t cols : {1, 2, 5, 8, 13}) {
      const auto a = random_vector(rng, rows * cols, true);
      const auto x = random_vector(rng, cols, true);
      std::vector<double> o1(rows), o2(rows);
      ref.matvec(a.data(), rows, cols, x.data(), o1.data());
      avx->matvec(a.data(), rows, cols, x.data(), o2.data());
      EXPECT_EQ(o1, o2) << rows << "x" << cols;
    }
}

TEST_F(KernelEquivalence, SumsAgreeToRounding) {
  std::mt19937_64 rng(3);
  for (std::size_t n : {1, 4, 9, 64, 1001}) {
    const auto x = random_vector(rng, n, true);
    const auto w = random_vector(rng, n, false);
    const double tol = 1e-13 * static_cast<double>(n);
    EXPECT_NEAR(ref.sum_abs(x.data(), n), avx->sum_abs(x.data(), n), tol);
    EXPECT_NEAR(ref.sum_squares(x.data(), n), avx->sum_squares(x.data(), n), 4 * tol);
    EXPECT_NEAR(ref.weighted_sum_abs(w.data(), x.data(), n),
                avx->weighted_sum_abs(w.data(), x.data(), n), 4 * tol);
  }
}

TEST_F(KernelEquivalence, PopcountIdentical) {
  std::mt19937_64 rng(5);
  for (std::size_t words : {0, 1, 3, 4, 9, 64}) {
    std::vector<std::uint64_t> a(words), b(words);
    for (auto& v : a) v = rng();
    for (auto& v : b) v = rng();
    EXPECT_EQ(ref.and_popcount(a.data(), b.data(), words),
              avx->and_popcount(a.data(), b.data(), words));
  }
}
