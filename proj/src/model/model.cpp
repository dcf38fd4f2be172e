#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "tailfactor/error.hpp"
#include "tailfactor/model.hpp"
#include "tailfactor/simd/kernels.hpp"

namespace tailfactor {

LoadingMatrix::LoadingMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (!entries_.allFinite()) throw InputError("loading matrix has non-finite entries");
}

std::vector<std::string> LoadingMatrix::violations(bool require_pure) const {
  std::vector<std::string> out;
  if (entries_.size() == 0) {
    out.emplace_back("loading matrix is empty");
    return out;
  }
  if (entries_.minCoeff() < 0.0 || entries_.maxCoeff() > 1.0 + kRowSumTolerance)
    out.emplace_back("loading entries outside [0,1]");
  for (Eigen::Index j = 0; j < entries_.rows(); ++j) {
    if (std::abs(entries_.row(j).sum() - 1.0) > kRowSumTolerance) {
      out.push_back("row sums: row " + std::to_string(j) + " does not sum to 1");
      break;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(entries_);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > kRankTolerance * s(0)) ++rank;
  if (entries_.rows() < entries_.cols() || rank < entries_.cols())
    out.emplace_back("column rank: loading matrix is rank deficient");
  if (require_pure) {
    const auto sets = pure_sets();
    for (std::size_t a = 0; a < sets.size(); ++a) {
      if (sets[a].empty()) {
        out.push_back("pure variable: no row equals unit vector e_" + std::to_string(a));
        break;
      }
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> LoadingMatrix::pure_sets() const {
  std::vector<std::vector<std::size_t>> sets(K());
  for (Eigen::Index j = 0; j < entries_.rows(); ++j) {
    Eigen::Index a = 0;
    if (entries_.row(j).maxCoeff(&a) >= 1.0 - kPureTolerance)
      sets[static_cast<std::size_t>(a)].push_back(static_cast<std::size_t>(j));
  }
  return sets;
}

FactorModel::FactorModel(LoadingMatrix loading, FactorSpectralSpec spectral)
    : loading_(std::move(loading)), spectral_(std::move(spectral)) {
  if (loading_.K() != spectral_.dim())
    throw StructuralError("loading has " + std::to_string(loading_.K()) +
                          " columns but the spectral measure has dimension " +
                          std::to_string(spectral_.dim()));
}

bool ValidationReport::has(const std::string& needle) const {
  for (const auto& v : violations)
    if (v.find(needle) != std::string::npos) return true;
  return false;
}

double diagonal_dominance(const Matrix& c) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < c.rows(); ++a)
    for (Eigen::Index b = 0; b < c.cols(); ++b)
      if (a != b) best = std::min(best, std::min(c(a, a), c(b, b)) - std::abs(c(a, b)));
  return best;
}

namespace {

constexpr double kDominanceTolerance = 1e-12;

bool positive_definite(const Matrix& c) {
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success) return false;
  return llt.matrixL().toDenseMatrix().diagonal().minCoeff() > kDominanceTolerance;
}

bool in_dominance_cone(const Matrix& c) {
  return diagonal_dominance(c) > kDominanceTolerance && positive_definite(c);
}

}  // namespace

ValidationReport validate_model(const FactorModel& model, const ValidationOptions& options) {
  ValidationReport report;
  report.violations = model.loading().violations(true);
  auto spectral = model.spectral().violations();
  report.violations.insert(report.violations.end(), spectral.begin(), spectral.end());
  if (!spectral.empty()) return report;

  const double k = static_cast<double>(model.K());
  const Vector mean = model.spectral().mean();
  for (Eigen::Index a = 0; a < mean.size(); ++a) {
    if (std::abs(mean(a) - 1.0 / k) > kRowSumTolerance) {
      report.violations.push_back("mean constraint: E[Lambda_" + std::to_string(a) +
                                  "] differs from 1/K");
      break;
    }
  }

  // On the 1-norm simplex |z|_1 = 1, so the latent TPDM is the second moment.
  const Matrix sigma_psi = model.spectral().second_moment();
  if (model.K() > 1 && !(diagonal_dominance(sigma_psi) > kDominanceTolerance))
    report.violations.emplace_back("diagonal dominance: Delta(Sigma_psi) is not positive");
  if (!positive_definite(sigma_psi))
    report.violations.emplace_back("positive definite: Sigma_psi is singular");

  const SpectralSample sample =
      model.spectral().integration_sample(options.mc_draws, options.seed);
  const auto& kt = simd::kernels();
  Matrix max_moment = Matrix::Zero(sample.atoms.cols(), sample.atoms.cols());
  for (Eigen::Index i = 0; i < sample.atoms.rows(); ++i) {
    const auto z = row_span(sample.atoms, i);
    const double r = kt.max_abs(z.data(), z.size());
    kt.outer_upper_accumulate(z.data(), z.size(), sample.weights(i) / r,
                              max_moment.data());
  }
  max_moment.triangularView<Eigen::StrictlyLower>() = max_moment.transpose();
  report.max_norm_condition = in_dominance_cone(max_moment);
  return report;
}

SyntheticSample simulate(const FactorModel& model, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ParameterError("sample size must be positive");
  Rng rng(seed);
  const auto d = static_cast<Eigen::Index>(model.d());
  const auto k = static_cast<Eigen::Index>(model.K());
  const Matrix& a = model.loading().entries();
  const auto& kt = simd::kernels();
  SyntheticSample out;
  out.seed = seed;
  out.data.resize(static_cast<Eigen::Index>(n), d);
  Vector z(k);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    const double r = 1.0 / uniform_open_closed(rng);
    z = (static_cast<double>(k) * r) * model.spectral().draw(rng);
    kt.matvec(a.data(), static_cast<std::size_t>(d), static_cast<std::size_t>(k), z.data(),
              out.data.data() + i * d);
  }
  return out;
}

}  // namespace tailfactor
