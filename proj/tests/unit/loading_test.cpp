#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/LU>

#include "random_models.hpp"
#include "tailfactor/error.hpp"
#include "tailfactor/loading.hpp"
#include "tailfactor/model.hpp"

namespace tf = tailfactor;
using tf::Matrix;
using tf::Vector;

namespace {

tf::PureVarResult partition_of(const tftest::Partition& p) {
  tf::PureVarResult r;
  r.partition = p;
  r.K_hat = p.size();
  for (const auto& s : p) r.pure.insert(r.pure.end(), s.begin(), s.end());
  std::sort(r.pure.begin(), r.pure.end());
  return r;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST(EstimateC, ThreeSiteTargets) {
  const auto t = tf::estimate_c(tftest::three_site_sigma(), partition_of({{0}, {2}}));
  EXPECT_EQ(t.C, (Matrix::Identity(2, 2) * 0.5).eval());
  EXPECT_DOUBLE_EQ(t.theta(1, 0), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(t.theta(1, 1), 1.0 / 3.0);
  const auto swapped = tf::estimate_c(tftest::three_site_sigma(), partition_of({{2}, {0}}));
  EXPECT_DOUBLE_EQ(swapped.theta(1, 0), 1.0 / 3.0);
}

TEST(EstimateC, AveragesOverSets) {
  Matrix s(3, 3);
  s << 1, 0.5, 0.2, 0.5, 0.9, 0.4, 0.2, 0.4, 0.8;
  const auto t = tf::estimate_c(s, partition_of({{0, 1}, {2}}));
  EXPECT_DOUBLE_EQ(t.C(0, 0), (1 + 0.5 + 0.5 + 0.9) / 4.0);
  EXPECT_DOUBLE_EQ(t.C(0, 1), (0.2 + 0.4) / 2.0);
  EXPECT_THROW(tf::estimate_c(s, partition_of({{0, 7}})), tf::StructuralError);
}

TEST(Fista, IdentityDesignSoftThresholds) {
  const auto r = tf::fista_lasso(Matrix::Identity(2, 2), vec({0.7, 0.1}), 0.2);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.beta(0), 0.5, 1e-12);
  EXPECT_EQ(r.beta(1), 0.0);
}

TEST(Fista, ExactSolveAndZeroTarget) {
  const Matrix C = Matrix::Identity(2, 2) * 0.5;
  const auto r = tf::fista_lasso(C, vec({1.0 / 6.0, 1.0 / 3.0}), 0.0);
  EXPECT_NEAR(r.beta(0), 1.0 / 3.0, 1e-8);
  EXPECT_NEAR(r.beta(1), 2.0 / 3.0, 1e-8);
  for (double lambda : {0.0, 0.1, 5.0}) {
    const auto z = tf::fista_lasso(C, Vector::Zero(2), lambda);
    EXPECT_EQ(z.beta, Vector::Zero(2));
  }
}

TEST(Fista, MonotoneObjectiveAndLeastSquaresQuality) {
  tf::Rng rng(4);
  for (int t = 0; t < 40; ++t) {
    const auto n = tftest::uniform_index(rng, 1, 8);
    const Matrix C = tftest::random_spd(rng, n, 50.0);
    Vector theta(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = tftest::uniform(rng, -1, 1);
    const double lambda = t % 2 ? 0.0 : tftest::uniform(rng, 0.0, 0.1);
    const auto r = tf::fista_lasso(C, theta, lambda, 20000, 1e-10, true);
    for (std::size_t i = 1; i < r.objective.size(); ++i)
      EXPECT_LE(r.objective[i], r.objective[i - 1]) << "iteration " << i;
    EXPECT_LE(tf::lasso_objective(C, theta, lambda, r.beta),
              tf::lasso_objective(C, theta, lambda, Vector::Zero(theta.size())));
    if (lambda == 0.0) {
      const Vector direct = C.lu().solve(theta);
      EXPECT_LE((C * r.beta - theta).norm(), (C * direct - theta).norm() + 1e-6);
    }
  }
}

TEST(Fista, L1NormShrinksAlongLambdaGrid) {
  tf::Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    const Matrix C = tftest::random_spd(rng, 6, 10.0) * 0.2;
    Vector theta(6);
    for (Eigen::Index i = 0; i < 6; ++i) theta(i) = tftest::uniform(rng, 0.0, 0.1);
    double previous = INFINITY;
    for (double lambda : tf::lambda_grid_default()) {
      const auto r = tf::fista_lasso(C, theta, lambda, 20000, 1e-12);
      const double l1 = r.beta.lpNorm<1>();
      EXPECT_LE(l1, previous + 1e-7) << "lambda " << lambda;
      previous = l1;
    }
  }
}

TEST(Ols, Examples) {
  const Matrix C = Matrix::Identity(2, 2) * 0.5;
  const Vector theta = vec({1.0 / 6.0, 1.0 / 3.0});
  const auto full = tf::ols_post_lasso(C, theta, {0, 1});
  EXPECT_NEAR(full.beta(0), 1.0 / 3.0, 1e-15);
  const auto one = tf::ols_post_lasso(C, theta, {1});
  EXPECT_EQ(one.beta(0), 0.0);
  EXPECT_NEAR(one.beta(1), 2.0 / 3.0, 1e-15);
  const auto singular = tf::ols_post_lasso(Matrix::Zero(1, 1), vec({0.3}), {0});
  EXPECT_TRUE(singular.singular);
  EXPECT_EQ(singular.beta(0), 0.0);
  EXPECT_TRUE(tf::ols_post_lasso(C, theta, {}).empty_support);
}

TEST(SimplexProject, Examples) {
  EXPECT_EQ(tf::simplex_project(vec({0.2, 0.8})), vec({0.2, 0.8}));
  const Vector a = tf::simplex_project(vec({1.2, 0.3}));
  EXPECT_NEAR(a(0), 0.95, 1e-15);
  EXPECT_NEAR(a(1), 0.05, 1e-15);
  EXPECT_EQ(tf::simplex_project(vec({2.0, -1.0})), vec({1.0, 0.0}));
  EXPECT_THROW(tf::simplex_project(Vector()), tf::StructuralError);
}

TEST(SimplexProject, MatchesKktOracle) {
  tf::Rng rng(12);
  for (int t = 0; t < 300; ++t) {
    Vector v(static_cast<Eigen::Index>(tftest::uniform_index(rng, 1, 10)));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = tftest::uniform(rng, -2, 2);
    const Vector p = tf::simplex_project(v);
    EXPECT_LE((p - tftest::simplex_projection_kkt(v)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_GE(p.minCoeff(), 0.0);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_EQ(tf::simplex_project(p), p);
  }
}

TEST(Lsp, ThreeSiteExactRecovery) {
  tf::LspConfig config;
  config.use_projection = true;
  const auto est = tf::lsp(tftest::three_site_sigma(), partition_of({{0}, {2}}), config);
  const Matrix A = tftest::three_site_model().loading().entries();
  EXPECT_LE((est.matrix - A).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_EQ(est.pure_row, (std::vector<bool>{true, false, true}));
}

TEST(Lsp, AllPureGivesIdentityPattern) {
  const Matrix s = Matrix::Identity(3, 3) * 0.4;
  const auto est = tf::lsp(s, partition_of({{1}, {0}, {2}}), {});
  Matrix expected = Matrix::Zero(3, 3);
  expected(1, 0) = expected(0, 1) = expected(2, 2) = 1.0;
  EXPECT_EQ(est.matrix, expected);
}

TEST(Lsp, HugeLambdaZeroesMixedRows) {
  tf::LspConfig config;
  config.lambda = 10.0;
  const auto est = tf::lsp(tftest::three_site_sigma(), partition_of({{0}, {2}}), config);
  EXPECT_EQ(est.matrix.row(1).sum(), 0.0);
  EXPECT_EQ(est.empty_support_rows, std::vector<std::size_t>{1});
}

TEST(Lsp, NoPureVariablesIsEstimationError) {
  EXPECT_THROW(tf::lsp(tftest::three_site_sigma(), tf::PureVarResult{}, {}), tf::EstimationError);
}

TEST(Lsp, ExactRecoveryOnRandomModels) {
  tf::Rng rng(21);
  tf::LspConfig config;
  config.use_projection = true;
  for (int t = 0; t < 100; ++t) {
    const auto m = tftest::random_pure_model(rng, 40, 8);
    const auto est = tf::lsp(m.sigma, partition_of(m.partition), config);
    EXPECT_LE((est.matrix - m.A).cwiseAbs().maxCoeff(), 1e-8) << "instance " << t;
    for (Eigen::Index j = 0; j < est.matrix.rows(); ++j)
      EXPECT_NEAR(est.matrix.row(j).sum(), 1.0, 1e-9);
  }
}

TEST(LambdaGrid, Defaults) {
  const auto g = tf::lambda_grid_default();
  ASSERT_EQ(g.size(), 100u);
  EXPECT_DOUBLE_EQ(g.front(), 0.00001);
  EXPECT_DOUBLE_EQ(g.back(), 0.001);
}
