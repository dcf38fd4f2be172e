#include <gtest/gtest.h>

#include "random_models.hpp"
#include "tailfactor/error.hpp"
#include "tailfactor/model.hpp"
#include "tailfactor/spectral.hpp"

namespace tf = tailfactor;
using tf::Matrix;

namespace {

tf::PureVarResult partition_of(const tftest::Partition& p) {
  tf::PureVarResult r;
  r.partition = p;
  r.K_hat = p.size();
  for (const auto& s : p) r.pure.insert(r.pure.end(), s.begin(), s.end());
  std::sort(r.pure.begin(), r.pure.end());
  return r;
}

}  // namespace

TEST(Aggregate, HandComputedRow) {
  tf::PseudoObservations p;
  p.values.resize(1, 3);
  p.values << 2.5, 9.0, 5.0;
  const auto agg = tf::aggregate(p, partition_of({{0}, {2}}));
  EXPECT_EQ(agg.z_values(0, 0), 2.5);
  EXPECT_EQ(agg.z_values(0, 1), 5.0);
  EXPECT_EQ(agg.radii(0), 7.5);
}

TEST(Aggregate, EqualColumnsAverageToThatColumn) {
  tf::PseudoObservations p;
  p.values.resize(2, 3);
  p.values << 3, 3, 1, 4, 4, 2;
  const auto agg = tf::aggregate(p, partition_of({{0, 1}, {2}}));
  EXPECT_EQ(agg.z_values.col(0), p.values.col(0));
  EXPECT_THROW(tf::aggregate(p, partition_of({{5}})), tf::StructuralError);
}

TEST(EmpiricalPsi, SingleFactorAtomsAtOne) {
  const auto s = tf::simulate(tftest::three_site_model(), 1000, 3);
  const auto agg = tf::aggregate(tf::pseudo_pareto(tf::DataMatrix(s.data)), partition_of({{0, 2}}));
  const auto psi = tf::empirical_psi(agg, 50);
  EXPECT_EQ(psi.dim(), 1u);
  for (std::size_t i = 0; i < psi.size(); ++i) EXPECT_EQ(psi.atoms(static_cast<Eigen::Index>(i), 0), 1.0);
  EXPECT_THROW(tf::empirical_psi(agg, 1000), tf::ParameterError);
}

TEST(EmpiricalPsi, ThreeSiteMomentsAndConcentration) {
  const auto s = tf::simulate(tftest::three_site_model(), 200000, 19);
  const auto agg = tf::aggregate(tf::pseudo_pareto(tf::DataMatrix(s.data)), partition_of({{0}, {2}}));
  const auto psi = tf::empirical_psi(agg, 4000);
  const auto mean = psi.weighted_mean();
  EXPECT_NEAR(mean(0), 0.5, 0.03);
  EXPECT_NEAR(mean(1), 0.5, 0.03);
  EXPECT_LE(psi.total_mass(), 1.0 + 1e-12);
  double near_vertex = 0.0;
  const auto w = psi.normalized_weights();
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const auto r = psi.atoms.row(static_cast<Eigen::Index>(i));
    EXPECT_NEAR(r.sum(), 1.0, 1e-15);
    if (std::min(std::abs(r(0) - 1.0) + r(1), r(0) + std::abs(r(1) - 1.0)) <= 0.1)
      near_vertex += w(static_cast<Eigen::Index>(i));
  }
  EXPECT_GE(near_vertex, 0.95);
}

TEST(EmpiricalPsi, InvariantUnderMonotoneTransforms) {
  const auto s = tf::simulate(tftest::three_site_model(), 3000, 4);
  Matrix t = s.data.array().sqrt();
  const auto p = partition_of({{0}, {2}});
  const auto a = tf::empirical_psi(tf::aggregate(tf::pseudo_pareto(tf::DataMatrix(s.data)), p), 100);
  const auto b = tf::empirical_psi(tf::aggregate(tf::pseudo_pareto(tf::DataMatrix(t)), p), 100);
  EXPECT_EQ(a.atoms, b.atoms);
  EXPECT_EQ(a.weights, b.weights);
}
