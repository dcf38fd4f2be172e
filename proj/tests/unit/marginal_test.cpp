#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "random_models.hpp"
#include "tailfactor/error.hpp"
#include "tailfactor/marginal.hpp"

namespace tf = tailfactor;

namespace {

std::vector<double> gpd_sample(std::uint64_t seed, std::size_t n, double xi, double sigma) {
  tf::Rng rng(seed);
  std::vector<double> y(n);
  for (auto& v : y) v = tftest::gpd_draw(rng, xi, sigma);
  return y;
}

}  // namespace

TEST(GpdCdf, ClosedForms) {
  EXPECT_NEAR(tf::gpd_cdf(2.0 * std::log(2.0), 0.0, 2.0), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(tf::gpd_cdf(1.0, 1.0, 1.0), 0.5);
  EXPECT_EQ(tf::gpd_cdf(2.0 * 3.0, -0.5, 3.0), 1.0);
  EXPECT_EQ(tf::gpd_cdf(0.0, 0.3, 1.0), 0.0);
}

TEST(GpdCdf, MonotoneAndContinuousAcrossZeroShape) {
  for (double y : {0.1, 1.0, 5.0}) {
    EXPECT_NEAR(tf::gpd_cdf(y, 1e-6, 1.5), tf::gpd_cdf(y, 0.0, 1.5), 1e-5);
    EXPECT_NEAR(tf::gpd_cdf(y, -1e-6, 1.5), tf::gpd_cdf(y, 0.0, 1.5), 1e-5);
  }
  for (double xi : {-0.4, 0.0, 0.7}) {
    double prev = 0.0;
    for (double y = 0.0; y < 10.0; y += 0.05) {
      const double f = tf::gpd_cdf(y, xi, 1.0);
      EXPECT_GE(f, prev);
      prev = f;
    }
  }
}

TEST(GpdMle, ExponentialExcesses) {
  const auto y = gpd_sample(11, 10000, 0.0, 2.0);
  const auto fit = tf::gpd_mle(y);
  EXPECT_TRUE(fit.converged);
  EXPECT_LE(std::abs(fit.xi), 0.05);
  EXPECT_LE(std::abs(fit.sigma - 2.0), 0.1);
  EXPECT_EQ(fit.excess_count, 10000u);
}

TEST(GpdMle, HeavyTail) {
  const auto fit = tf::gpd_mle(gpd_sample(11, 10000, 0.5, 1.0));
  EXPECT_GE(fit.xi, 0.45);
  EXPECT_LE(fit.xi, 0.55);
}

TEST(GpdMle, BeatsLikelihoodGrid) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const double xi = -0.3 + 0.15 * static_cast<double>(seed);
    const auto y = gpd_sample(seed, 60, xi, 1.0);
    const auto fit = tf::gpd_mle(y);
    const double best = tftest::grid_best_loglik(y, -0.49, 1.5, 0.05, 4.0, 50, 50);
    EXPECT_GE(tf::gpd_loglik(y, fit.xi, fit.sigma), best - 1e-9) << "seed " << seed;
  }
}

TEST(GpdMle, DegenerateAndInvalidInput) {
  const std::vector<double> constant(20, 1.5);
  EXPECT_FALSE(tf::gpd_mle(constant).converged);
  EXPECT_THROW(tf::gpd_mle(std::vector<double>(9, 1.0)), tf::EstimationError);
  std::vector<double> bad(20, 1.0);
  bad[3] = 0.0;
  EXPECT_THROW(tf::gpd_mle(bad), tf::InputError);
}

TEST(FitMargin, OrderStatistics) {
  std::vector<double> col(100);
  for (std::size_t i = 0; i < 100; ++i) col[i] = static_cast<double>(100 - i);
  const auto r = tf::fit_margin(col, 10);
  EXPECT_EQ(r.fit.threshold, 90.0);
  EXPECT_EQ(r.fit.excess_count, 10u);
  EXPECT_EQ(r.fit.k, 10u);
  EXPECT_EQ(r.fit.n, 100u);
  EXPECT_EQ(r.dropped_ties, 0u);
  EXPECT_EQ(tf::fit_margin(col, 99).fit.threshold, 1.0);
  EXPECT_THROW(tf::fit_margin(col, 9), tf::ParameterError);
  EXPECT_THROW(tf::fit_margin(col, 100), tf::ParameterError);
}

TEST(FitMargin, TiesAtThresholdDropped) {
  std::vector<double> col(100);
  for (std::size_t i = 0; i < 100; ++i) col[i] = static_cast<double>(i);
  for (std::size_t i = 80; i < 90; ++i) col[i] = 85.0;  // threshold value repeated
  const auto r = tf::fit_margin(col, 15);
  EXPECT_EQ(r.fit.threshold, 85.0);
  EXPECT_EQ(r.dropped_ties, 5u);
  EXPECT_EQ(r.fit.excess_count, 10u);
}

TEST(TailProb, Branches) {
  std::vector<double> col(100);
  for (std::size_t i = 0; i < 100; ++i) col[i] = static_cast<double>(i + 1);
  const auto r = tf::fit_margin(col, 10);
  const tf::Ecdf ecdf(col);
  EXPECT_EQ(tf::tail_prob(0.5, r.fit, ecdf), 1.0);
  EXPECT_DOUBLE_EQ(tf::tail_prob(r.fit.threshold, r.fit, ecdf), 1.0 - 90.0 / 101.0);
  EXPECT_NEAR(tf::tail_prob(std::nextafter(r.fit.threshold, 1e9), r.fit, ecdf), 0.1, 1e-12);
  double prev = 1.0;
  for (double x = 91.0; x < 300.0; x += 1.0) {
    const double q = tf::tail_prob(x, r.fit, ecdf);
    EXPECT_LE(q, prev);
    EXPECT_GE(q, 0.0);
    prev = q;
  }
  const double level = tf::gpd_return_level(0.01, r.fit);
  EXPECT_NEAR(tf::tail_prob(level, r.fit, ecdf), 0.01, 1e-12);
}
