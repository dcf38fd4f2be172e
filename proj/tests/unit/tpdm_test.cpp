#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "random_models.hpp"
#include "tailfactor/error.hpp"
#include "tailfactor/model.hpp"
#include "tailfactor/tpdm.hpp"

namespace tf = tailfactor;
using tf::Matrix;

TEST(PseudoPareto, HandComputedColumn) {
  Matrix x(4, 1);
  x << 3, 1, 4, 2;
  const auto p = tf::pseudo_pareto(tf::DataMatrix(x));
  EXPECT_EQ(p.ranks(0, 0), 3);
  EXPECT_EQ(p.ranks(1, 0), 1);
  EXPECT_EQ(p.ranks(2, 0), 4);
  EXPECT_EQ(p.ranks(3, 0), 2);
  EXPECT_DOUBLE_EQ(p.values(0, 0), 2.5);
  EXPECT_DOUBLE_EQ(p.values(1, 0), 1.25);
  EXPECT_DOUBLE_EQ(p.values(2, 0), 5.0);
  EXPECT_DOUBLE_EQ(p.values(3, 0), 5.0 / 3.0);
  EXPECT_TRUE(p.tied_columns.empty());
}

TEST(PseudoPareto, ConstantColumnUsesRowOrderAndIsFlagged) {
  Matrix x(5, 2);
  x << 1, 7, 2, 7, 3, 7, 4, 7, 5, 7;
  const auto p = tf::pseudo_pareto(tf::DataMatrix(x));
  for (Eigen::Index i = 0; i < 5; ++i) {
    EXPECT_EQ(p.ranks(i, 0), i + 1);
    EXPECT_EQ(p.ranks(i, 1), i + 1);
  }
  EXPECT_EQ(p.tied_columns, std::vector<std::size_t>{1});
}

TEST(PseudoPareto, InvariantUnderMonotoneTransforms) {
  const auto s = tf::simulate(tftest::three_site_model(), 2000, 5);
  Matrix t = s.data;
  t.col(0) = (t.col(0).array() + 1.0).log();
  t.col(2) = t.col(2).array().cube() + 3.0;
  EXPECT_EQ(tf::pseudo_pareto(tf::DataMatrix(s.data)).values,
            tf::pseudo_pareto(tf::DataMatrix(t)).values);
}

TEST(DataMatrix, RejectsBadInput) {
  Matrix one(1, 2);
  one << 1, 2;
  EXPECT_THROW(tf::DataMatrix{one}, tf::ParameterError);
  Matrix bad(2, 2);
  bad << 1, 2, NAN, 4;
  EXPECT_THROW(tf::DataMatrix{bad}, tf::InputError);
}

TEST(EmpiricalTpdm, OneDimensionalIsEffectiveCountOverK) {
  Matrix x(50, 1);
  for (Eigen::Index i = 0; i < 50; ++i) x(i, 0) = static_cast<double>((i * 7) % 50);
  const auto p = tf::pseudo_pareto(tf::DataMatrix(x));
  for (std::size_t k : {1, 5, 49}) {
    const auto t = tf::empirical_tpdm(p, k, tf::Norm::two());
    EXPECT_DOUBLE_EQ(t.matrix(0, 0),
                     static_cast<double>(t.effective_count) / static_cast<double>(k));
  }
  EXPECT_THROW(tf::empirical_tpdm(p, 50), tf::ParameterError);
  EXPECT_THROW(tf::empirical_tpdm(p, 0), tf::ParameterError);
}

TEST(EmpiricalTpdm, PermutationEquivariantSymmetricPsd) {
  const auto s = tf::simulate(tftest::three_site_model(), 5000, 6);
  const auto t = tf::empirical_tpdm(tf::pseudo_pareto(tf::DataMatrix(s.data)), 250);
  Matrix permuted(s.data.rows(), 3);
  permuted << s.data.col(2), s.data.col(0), s.data.col(1);
  const auto u = tf::empirical_tpdm(tf::pseudo_pareto(tf::DataMatrix(permuted)), 250);
  const std::vector<int> map = {2, 0, 1};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_NEAR(u.matrix(a, b), t.matrix(map[a], map[b]), 1e-15);
  EXPECT_EQ(t.matrix, t.matrix.transpose());
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Matrix>(t.matrix).eigenvalues().minCoeff(), -1e-14);
}

TEST(EmpiricalTpdm, TwoNormTraceIsEffectiveCountOverK) {
  const auto s = tf::simulate(tftest::three_site_model(), 3000, 7);
  const auto t = tf::empirical_tpdm(tf::pseudo_pareto(tf::DataMatrix(s.data)), 150, tf::Norm::two());
  EXPECT_NEAR(t.matrix.trace(), static_cast<double>(t.effective_count) / 150.0, 1e-12);
}

TEST(EmpiricalTpdm, MaxNormEntriesBounded) {
  const auto s = tf::simulate(tftest::three_site_model(), 3000, 8);
  const auto p = tf::pseudo_pareto(tf::DataMatrix(s.data));
  const auto t = tf::empirical_tpdm(p, 150, tf::Norm::max());
  double bound = 0.0;
  for (Eigen::Index i = 0; i < p.values.rows(); ++i) {
    const auto r = p.values.row(i);
    bound = std::max(bound, r.squaredNorm() / (r.cwiseAbs().maxCoeff() * r.cwiseAbs().maxCoeff()));
  }
  EXPECT_GE(t.matrix.minCoeff(), 0.0);
  EXPECT_LE(t.matrix.maxCoeff(), bound);
}

TEST(EmpiricalTpdm, RadiusTiesShrinkEffectiveCount) {
  Matrix x(6, 1);
  x << 1, 2, 3, 4, 5, 6;
  auto p = tf::pseudo_pareto(tf::DataMatrix(x));
  p.values(4, 0) = p.values(5, 0);  // tie at the top two radii
  const auto t = tf::empirical_tpdm(p, 1);
  EXPECT_EQ(t.effective_count, 0u);
  EXPECT_EQ(t.matrix(0, 0), 0.0);
}

TEST(EmpiricalChi, ComonotoneAndAntithetic) {
  Matrix x(100, 3);
  for (Eigen::Index i = 0; i < 100; ++i) {
    const double v = std::sin(static_cast<double>(i) * 1.3);
    x(i, 0) = v;
    x(i, 1) = v;
    x(i, 2) = -v;
  }
  const Matrix chi = tf::empirical_chi(tf::DataMatrix(x), 20);
  EXPECT_EQ(chi(0, 1), 1.0);
  EXPECT_EQ(chi(0, 2), 0.0);
  EXPECT_EQ(chi.diagonal(), tf::Vector::Ones(3));
  EXPECT_THROW(tf::empirical_chi(tf::DataMatrix(x), 100), tf::ParameterError);
}

TEST(EmpiricalChi, ThreeSiteMatchesOracle) {
  const auto s = tf::simulate(tftest::three_site_model(), 200000, 7);
  const Matrix chi = tf::empirical_chi(tf::DataMatrix(s.data), 4000);
  EXPECT_NEAR(chi(0, 1), 1.0 / 3.0, 0.04);
  EXPECT_NEAR(chi(0, 2), 0.0, 0.04);
}
