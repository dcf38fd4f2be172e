#include "tailfactor/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <tuple>

#include "tailfactor/error.hpp"
#include "tailfactor/rng.hpp"
#include "tailfactor/simd/kernels.hpp"

namespace tailfactor {

ProbabilityEstimate estimate_p(const Matrix& loading, const SpectralSample& psi,
                               std::span<const double> tail_probs,
                               const SubsetFamily& family) {
  const auto d = static_cast<std::size_t>(loading.rows());
  const auto k = static_cast<std::size_t>(loading.cols());
  if (k == 0) throw EstimationError("no latent factors");
  if (psi.dim() != k) throw StructuralError("spectral sample dimension differs from K");
  if (tail_probs.size() != d)
    throw StructuralError("expected " + std::to_string(d) + " tail probabilities");
  family.check_dimension(d);

  const auto& kt = simd::kernels();
  std::vector<double> v(d);
  double total = 0.0;
  for (Eigen::Index i = 0; i < psi.atoms.rows(); ++i) {
    kt.matvec(loading.data(), d, k, psi.atoms.data() + i * psi.atoms.cols(), v.data());
    kt.multiply_inplace(v.data(), tail_probs.data(), d);
    total += psi.weights(i) * family_max_min(v, family);
  }
  ProbabilityEstimate out;
  out.raw = static_cast<double>(k) * total;
  out.clipped = out.raw > 1.0 || out.raw < 0.0;
  out.p = std::clamp(out.raw, 0.0, 1.0);
  return out;
}

ProbabilityEstimate estimate_p(const FittedTailModel& model, std::span<const double> x,
                               const SubsetFamily& family) {
  if (model.K_hat == 0) throw EstimationError("no latent factors");
  if (x.size() != model.margins.size())
    throw StructuralError("threshold vector has length " + std::to_string(x.size()) +
                          ", expected " + std::to_string(model.margins.size()));
  std::vector<double> q(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) q[j] = model.margins[j].tail_prob(x[j]);
  return estimate_p(model.loading.matrix, model.psi_hat, q, family);
}

Matrix model_chi(const Matrix& loading, const SpectralSample& psi) {
  const auto d = static_cast<std::size_t>(loading.rows());
  const auto k = static_cast<std::size_t>(loading.cols());
  if (psi.dim() != k) throw StructuralError("spectral sample dimension differs from K");
  const auto& kt = simd::kernels();
  Matrix chi = Matrix::Zero(loading.rows(), loading.rows());
  std::vector<double> u(d);
  for (Eigen::Index i = 0; i < psi.atoms.rows(); ++i) {
    kt.matvec(loading.data(), d, k, psi.atoms.data() + i * psi.atoms.cols(), u.data());
    kt.pairwise_min_upper_accumulate(u.data(), d, psi.weights(i), chi.data());
  }
  const double scale = static_cast<double>(k);
  for (Eigen::Index j = 0; j < chi.rows(); ++j) {
    for (Eigen::Index l = j; l < chi.cols(); ++l) {
      const double c = std::min(1.0, scale * chi(j, l));
      chi(j, l) = c;
      chi(l, j) = c;
    }
  }
  return chi;
}

std::optional<double> r_squared(const Matrix& chi_model, const Matrix& chi_emp) {
  if (chi_model.rows() != chi_emp.rows() || chi_model.cols() != chi_emp.cols() ||
      chi_emp.rows() != chi_emp.cols())
    throw StructuralError("tail correlation matrices differ in shape");
  if (chi_emp.rows() < 2) throw StructuralError("R^2 needs at least two coordinates");
  const auto d = chi_emp.rows();
  double mean = 0.0;
  std::size_t count = 0;
  bool constant = true;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index l = j + 1; l < d; ++l) {
      mean += chi_emp(j, l);
      constant = constant && chi_emp(j, l) == chi_emp(0, 1);
      ++count;
    }
  if (constant) return std::nullopt;
  mean /= static_cast<double>(count);
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index l = j + 1; l < d; ++l) {
      const double r = chi_emp(j, l) - chi_model(j, l);
      const double t = chi_emp(j, l) - mean;
      ss_res += r * r;
      ss_tot += t * t;
    }
  if (!(ss_tot > 0.0)) return std::nullopt;
  return 1.0 - ss_res / ss_tot;
}

SelectionResult select_hyperparameters(const DataMatrix& data,
                                       const SelectionSettings& settings) {
  const std::vector<double> kappas =
      kappa_grid(settings.kappa_grid.empty() ? nullptr : &settings.kappa_grid);
  const std::vector<double> lambdas =
      settings.lambda_grid.empty() ? lambda_grid_default() : settings.lambda_grid;
  for (double l : lambdas)
    if (!std::isfinite(l) || l < 0.0) throw ParameterError("lambda grid values must be >= 0");
  if (settings.projection.empty()) throw ParameterError("projection choices are empty");

  const PseudoObservations pseudo = pseudo_pareto(data);
  const Tpdm tpdm = empirical_tpdm(pseudo, settings.k, settings.norm);
  const Matrix chi_emp = empirical_chi(pseudo.ranks, settings.k_prime);

  SelectionResult out;
  double best = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (double kappa : kappas) {
    const PureVarResult pv = pure_var(tpdm, kappa);
    if (pv.K_hat == 0) {
      for (double lambda : lambdas)
        for (bool proj : settings.projection)
          out.table.push_back({{kappa, lambda, proj}, 0, std::nullopt});
      continue;
    }
    const AggregatedObservations agg = aggregate(pseudo, pv);
    const SpectralSample psi = empirical_psi(agg, settings.k_prime);
    for (double lambda : lambdas) {
      for (bool proj : settings.projection) {
        LspConfig config = settings.lsp;
        config.lambda = lambda;
        config.use_projection = proj;
        LoadingEstimate estimate = lsp(tpdm, pv, config);
        const auto r2 = r_squared(model_chi(estimate.matrix, psi), chi_emp);
        out.table.push_back({{kappa, lambda, proj}, pv.K_hat, r2});
        if (r2 && *r2 > best) {
          best = *r2;
          found = true;
          FittedTailModel& m = out.model;
          m.K_hat = pv.K_hat;
          m.purevar = pv;
          m.loading = std::move(estimate);
          m.psi_hat = psi;
          m.config = {kappa, lambda, proj};
          m.r_squared = *r2;
          m.adequate = *r2 > kAdequateRSquared;
        }
      }
    }
  }
  if (!found)
    throw EstimationError("no hyperparameter configuration produced a usable model");
  out.model.k = settings.k;
  out.model.k_prime = settings.k_prime;
  out.model.norm = settings.norm;
  return out;
}

DataMatrix lower_tail_transform(const DataMatrix& data) {
  const Matrix& w = data.values();
  if ((w.array() <= 0.0).any())
    throw InputError("lower-tail transform needs strictly positive data");
  return DataMatrix(w.cwiseInverse());
}

std::vector<double> lower_tail_thresholds(std::span<const double> w) {
  std::vector<double> out(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (!(w[j] > 0.0)) throw InputError("lower-tail thresholds must be strictly positive");
    out[j] = 1.0 / w[j];
  }
  return out;
}

double empirical_p(const DataMatrix& data, std::span<const double> x,
                   const SubsetFamily& family) {
  const Matrix& v = data.values();
  if (x.size() != data.d())
    throw StructuralError("threshold vector has length " + std::to_string(x.size()) +
                          ", expected " + std::to_string(data.d()));
  family.check_dimension(data.d());
  std::unique_ptr<bool[]> exceeds(new bool[x.size()]);
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j)
      exceeds[j] = v(i, static_cast<Eigen::Index>(j)) > x[j];
    if (family.covered_by({exceeds.get(), x.size()})) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(v.rows());
}

std::pair<double, double> basic_interval(double point, double q_lo, double q_hi) {
  const double lower = std::clamp(2.0 * point - q_hi, 0.0, 1.0);
  const double upper = std::clamp(2.0 * point - q_lo, 0.0, 1.0);
  return {lower, upper};
}

double order_statistic_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw EstimationError("no bootstrap replicates");
  const auto b = static_cast<double>(sorted.size());
  auto index = static_cast<std::size_t>(std::ceil(q * b));
  index = std::clamp<std::size_t>(index, 1, sorted.size());
  return sorted[index - 1];
}

DataMatrix resample_rows(const DataMatrix& data, std::uint64_t seed) {
  Rng rng(seed);
  const Matrix& v = data.values();
  const auto n = v.rows();
  Matrix out(n, v.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const auto src = std::min<Eigen::Index>(static_cast<Eigen::Index>(u * static_cast<double>(n)), n - 1);
    out.row(i) = v.row(src);
  }
  return DataMatrix(std::move(out));
}

std::vector<BootstrapCi> bootstrap_ci_vector(const DataMatrix& data,
                                             const VectorEstimator& estimator,
                                             std::size_t replicates, double beta,
                                             std::uint64_t seed) {
  if (replicates == 0) throw ParameterError("bootstrap needs at least one replicate");
  if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("beta must lie in (0, 1)");
  const std::vector<double> point = estimator(data);
  std::vector<std::vector<double>> values(point.size());
  std::size_t failed = 0;
  for (std::size_t b = 0; b < replicates; ++b) {
    std::vector<double> rep;
    try {
      rep = estimator(resample_rows(data, derive_seed(seed, b)));
    } catch (const Error&) {
      ++failed;
      continue;
    }
    if (rep.size() != point.size())
      throw StructuralError("bootstrap estimator changed its output length");
    for (std::size_t s = 0; s < rep.size(); ++s) values[s].push_back(rep[s]);
  }
  const std::size_t ok = replicates - failed;
  if (static_cast<double>(ok) < 0.9 * static_cast<double>(replicates))
    throw EstimationError("only " + std::to_string(ok) + " of " + std::to_string(replicates) +
                          " bootstrap replicates succeeded");
  std::vector<BootstrapCi> out(point.size());
  for (std::size_t s = 0; s < point.size(); ++s) {
    auto& sorted = values[s];
    std::sort(sorted.begin(), sorted.end());
    BootstrapCi& ci = out[s];
    ci.point = point[s];
    ci.level = 1.0 - beta;
    ci.replicates = replicates;
    ci.failed = failed;
    const double q_lo = order_statistic_quantile(sorted, beta / 2.0);
    const double q_hi = order_statistic_quantile(sorted, 1.0 - beta / 2.0);
    std::tie(ci.lower, ci.upper) = basic_interval(ci.point, q_lo, q_hi);
  }
  return out;
}

BootstrapCi bootstrap_ci(const DataMatrix& data, const Estimator& estimator,
                         std::size_t replicates, double beta, std::uint64_t seed) {
  return bootstrap_ci_vector(
      data, [&](const DataMatrix& x) { return std::vector<double>{estimator(x)}; },
      replicates, beta, seed)
      .front();
}

}  // namespace tailfactor
