#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "random_models.hpp"
#include "tailfactor/error.hpp"
#include "tailfactor/purevar.hpp"

namespace tf = tailfactor;
using tf::Matrix;

TEST(PureVar, ThreeSiteExactTpdm) {
  const auto r = tf::pure_var(tftest::three_site_sigma(), 0.01);
  EXPECT_EQ(r.K_hat, 2u);
  EXPECT_TRUE(tftest::same_partition(r.partition, {{0}, {2}}));
  EXPECT_EQ(r.pure, (std::vector<std::size_t>{0, 2}));
}

TEST(PureVar, ScaledIdentityGivesSingletons) {
  const Matrix s = Matrix::Identity(5, 5) * 0.3;
  const auto r = tf::pure_var(s, 0.1);
  EXPECT_EQ(r.K_hat, 5u);
  EXPECT_TRUE(tftest::same_partition(r.partition, {{0}, {1}, {2}, {3}, {4}}));
}

TEST(PureVar, ConstantMatrixGivesOneSet) {
  const auto r = tf::pure_var(Matrix::Constant(4, 4, 0.2), 0.001);
  EXPECT_EQ(r.K_hat, 1u);
  EXPECT_TRUE(tftest::same_partition(r.partition, {{0, 1, 2, 3}}));
}

TEST(PureVar, RejectsBadInput) {
  EXPECT_THROW(tf::pure_var(Matrix::Ones(2, 3), 0.1), tf::StructuralError);
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 0.5;
  EXPECT_THROW(tf::pure_var(asym, 0.1), tf::StructuralError);
  EXPECT_THROW(tf::pure_var(Matrix::Identity(2, 2), 0.0), tf::ParameterError);
}

TEST(PureVar, RowHoldingGlobalMaximumIsPure) {
  tf::Rng rng(41);
  for (int t = 0; t < 200; ++t) {
    const auto d = static_cast<Eigen::Index>(tftest::uniform_index(rng, 1, 12));
    Matrix s(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = a; b < d; ++b) s(a, b) = s(b, a) = tftest::uniform(rng, 0.0, 1.0);
    Eigen::Index row = 0, col = 0;
    s.maxCoeff(&row, &col);
    const auto r = tf::pure_var(s, 1e-4);
    ASSERT_GE(r.K_hat, 1u);
    EXPECT_TRUE(std::binary_search(r.pure.begin(), r.pure.end(), static_cast<std::size_t>(row)));
  }
}

TEST(PureVar, EquivariantUnderRelabeling) {
  tf::Rng rng(31);
  for (int t = 0; t < 30; ++t) {
    const auto m = tftest::random_pure_model(rng, 20, 5);
    const double kappa = tftest::recovery_gap(m.sigma) / 4.0;
    const auto d = static_cast<std::size_t>(m.sigma.rows());
    std::vector<std::size_t> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix p(m.sigma.rows(), m.sigma.cols());
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        p(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            m.sigma(static_cast<Eigen::Index>(perm[a]), static_cast<Eigen::Index>(perm[b]));
    auto r = tf::pure_var(p, kappa).partition;
    for (auto& s : r)
      for (auto& j : s) j = perm[j];
    EXPECT_TRUE(tftest::same_partition(r, tf::pure_var(m.sigma, kappa).partition));
  }
}

TEST(PureVar, ExactRecoveryOnRandomModels) {
  tf::Rng rng(77);
  for (int t = 0; t < 100; ++t) {
    const auto m = tftest::random_pure_model(rng, 40, 8);
    const double kappa = tftest::recovery_gap(m.sigma, &m.pure) / 4.0;
    const auto r = tf::pure_var(m.sigma, kappa);
    EXPECT_EQ(r.K_hat, static_cast<std::size_t>(m.A.cols()));
    EXPECT_TRUE(tftest::same_partition(r.partition, m.partition)) << "instance " << t;
  }
}

TEST(KappaGrid, Defaults) {
  const auto g = tf::kappa_grid_default();
  ASSERT_EQ(g.size(), 13u);
  EXPECT_DOUBLE_EQ(g.front(), 0.002);
  EXPECT_DOUBLE_EQ(g.back(), 0.008);
  const std::vector<double> user = {0.01, 0.003};
  EXPECT_EQ(tf::kappa_grid(&user), user);
  const std::vector<double> empty;
  EXPECT_THROW(tf::kappa_grid(&empty), tf::ParameterError);
  EXPECT_EQ(tf::kappa_grid(nullptr), g);
}
