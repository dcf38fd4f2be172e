#include "tailfactor/loading.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "tailfactor/error.hpp"

namespace tailfactor {

std::vector<double> lambda_grid_default() {
  std::vector<double> grid;
  for (int i = 1; i <= 100; ++i) grid.push_back(static_cast<double>(i) * 0.00001);
  return grid;
}

LatentTargets estimate_c(const Matrix& sigma, const PureVarResult& purevar) {
  const auto& sets = purevar.partition;
  if (sets.empty()) throw StructuralError("partition is empty");
  const auto d = sigma.rows();
  for (const auto& s : sets) {
    if (s.empty()) throw StructuralError("partition contains an empty set");
    for (std::size_t j : s)
      if (static_cast<Eigen::Index>(j) >= d)
        throw StructuralError("partition index " + std::to_string(j) + " out of range");
  }
  const auto k = static_cast<Eigen::Index>(sets.size());
  LatentTargets out;
  out.theta.resize(d, k);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index a = 0; a < k; ++a) {
      const auto& s = sets[static_cast<std::size_t>(a)];
      double total = 0.0;
      for (std::size_t l : s) total += sigma(static_cast<Eigen::Index>(l), j);
      out.theta(j, a) = total / static_cast<double>(s.size());
    }
  }
  out.C.resize(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a; b < k; ++b) {
      const auto& sa = sets[static_cast<std::size_t>(a)];
      const auto& sb = sets[static_cast<std::size_t>(b)];
      double total = 0.0;
      for (std::size_t j : sa)
        for (std::size_t l : sb)
          total += sigma(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l));
      const double c = total / static_cast<double>(sa.size() * sb.size());
      out.C(a, b) = c;
      out.C(b, a) = c;
    }
  }
  return out;
}

double lasso_objective(const Matrix& C, const Vector& theta, double lambda,
                       const Vector& beta) {
  return 0.5 * (C * beta - theta).squaredNorm() + lambda * beta.cwiseAbs().sum();
}

namespace {

Vector soft_threshold(const Vector& v, double t) {
  return v.unaryExpr([t](double x) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
  });
}

}  // namespace

FistaResult fista_lasso(const Matrix& C, const Vector& theta, double lambda,
                        std::size_t max_iter, double tol, bool record_objective) {
  if (C.rows() != C.cols() || C.rows() != theta.size())
    throw StructuralError("FISTA needs a square design matching the target length");
  if (!C.allFinite() || !theta.allFinite() || !std::isfinite(lambda))
    throw InputError("FISTA inputs must be finite");
  if (lambda < 0.0) throw ParameterError("lambda must be nonnegative");
  if (!(tol > 0.0)) throw ParameterError("FISTA tolerance must be positive");

  const auto k = C.cols();
  FistaResult out;
  out.beta = Vector::Zero(k);
  const Eigen::MatrixXd ct = C.transpose();
  const Vector ctheta = ct * theta;
  const double lipschitz = [&] {
    if (k == 0) return 0.0;
    const double s = Eigen::JacobiSVD<Eigen::MatrixXd>(C).singularValues()(0);
    return s * s;
  }();
  if (!(lipschitz > 0.0)) {
    out.converged = true;
    return out;
  }
  const Eigen::MatrixXd gram = ct * C;
  const double step = 1.0 / lipschitz;
  const double scale = std::max(1.0, ctheta.cwiseAbs().maxCoeff());
  auto gradient = [&](const Vector& b) -> Vector { return gram * b - ctheta; };
  auto residual = [&](const Vector& b) {
    const Vector p = soft_threshold(b - step * gradient(b), step * lambda);
    return lipschitz * (b - p).cwiseAbs().maxCoeff();
  };

  Vector x = out.beta;
  Vector x_prev = x;
  Vector y = x;
  double fx = lasso_objective(C, theta, lambda, x);
  double t = 1.0;
  if (residual(x) <= tol * scale) {
    out.converged = true;
    return out;
  }
  for (std::size_t it = 1; it <= max_iter; ++it) {
    const Vector z = soft_threshold(y - step * gradient(y), step * lambda);
    const double fz = lasso_objective(C, theta, lambda, z);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    x_prev = x;
    if (fz <= fx) {
      x = z;
      fx = fz;
      y = x + ((t - 1.0) / t_next) * (x - x_prev) + (t / t_next) * (z - x);
      t = t_next;
    } else {
      // No descent: keep x and restart the momentum from it.
      y = x;
      t = 1.0;
    }
    out.iterations = it;
    if (record_objective) out.objective.push_back(fx);
    if (residual(x) <= tol * scale) {
      out.converged = true;
      break;
    }
  }
  out.beta = x;
  return out;
}

OlsResult ols_post_lasso(const Matrix& C, const Vector& theta,
                         const std::vector<std::size_t>& support) {
  const auto k = C.cols();
  OlsResult out;
  out.beta = Vector::Zero(k);
  if (support.empty()) {
    out.empty_support = true;
    return out;
  }
  const auto s = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd sub(s, s);
  Eigen::VectorXd rhs(s);
  for (Eigen::Index a = 0; a < s; ++a) {
    const auto ia = static_cast<Eigen::Index>(support[static_cast<std::size_t>(a)]);
    if (ia >= k) throw StructuralError("support index out of range");
    rhs(a) = theta(ia);
    for (Eigen::Index b = 0; b < s; ++b)
      sub(a, b) = C(ia, static_cast<Eigen::Index>(support[static_cast<std::size_t>(b)]));
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sub);
  cod.setThreshold(1e-12);
  out.singular = cod.rank() < s;
  const Eigen::VectorXd sol = cod.solve(rhs);
  for (Eigen::Index a = 0; a < s; ++a)
    out.beta(static_cast<Eigen::Index>(support[static_cast<std::size_t>(a)])) = sol(a);
  return out;
}

Vector simplex_project(const Vector& v) {
  if (v.size() == 0) throw StructuralError("cannot project an empty vector");
  if (!v.allFinite()) throw InputError("cannot project a non-finite vector");
  if (v.minCoeff() >= 0.0 && std::abs(v.sum() - 1.0) <= 1e-12) return v;

  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) tau = candidate;
  }
  return (v.array() - tau).cwiseMax(0.0).matrix();
}

namespace {

void check_partition(const PureVarResult& purevar, Eigen::Index d) {
  std::vector<bool> seen(static_cast<std::size_t>(d), false);
  for (const auto& s : purevar.partition) {
    for (std::size_t j : s) {
      if (static_cast<Eigen::Index>(j) >= d)
        throw StructuralError("partition index " + std::to_string(j) + " out of range");
      if (seen[j]) throw StructuralError("partition sets overlap at index " + std::to_string(j));
      seen[j] = true;
    }
  }
}

}  // namespace

LoadingEstimate lsp(const Matrix& sigma, const PureVarResult& purevar, const LspConfig& config) {
  if (purevar.partition.empty()) throw EstimationError("no pure variables");
  if (config.lambda < 0.0 || !std::isfinite(config.lambda))
    throw ParameterError("lambda must be nonnegative");
  if (!(config.fista_tol > 0.0)) throw ParameterError("FISTA tolerance must be positive");
  const auto d = sigma.rows();
  check_partition(purevar, d);
  const LatentTargets targets = estimate_c(sigma, purevar);
  const auto k = targets.C.rows();

  LoadingEstimate out;
  out.config = config;
  out.matrix = Matrix::Zero(d, k);
  out.pure_row.assign(static_cast<std::size_t>(d), false);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (std::size_t j : purevar.partition[static_cast<std::size_t>(a)]) {
      out.matrix(static_cast<Eigen::Index>(j), a) = 1.0;
      out.pure_row[j] = true;
    }
  }

  for (Eigen::Index j = 0; j < d; ++j) {
    const auto row = static_cast<std::size_t>(j);
    if (out.pure_row[row]) continue;
    const Vector theta = targets.theta.row(j).transpose();
    const FistaResult fit =
        fista_lasso(targets.C, theta, config.lambda, config.fista_max_iter, config.fista_tol);
    if (!fit.converged) out.unconverged_rows.push_back(row);
    Vector beta = fit.beta;

    std::vector<std::size_t> support;
    for (Eigen::Index a = 0; a < k; ++a)
      if (std::abs(beta(a)) > kSupportThreshold) support.push_back(static_cast<std::size_t>(a));
    if (support.empty()) out.empty_support_rows.push_back(row);
    if (config.post_lasso) {
      const OlsResult ols = ols_post_lasso(targets.C, theta, support);
      if (ols.singular) out.singular_rows.push_back(row);
      beta = ols.beta;
    }

    beta = beta.cwiseMax(0.0);

    if (config.use_projection) {
      std::vector<Eigen::Index> nonzero;
      for (Eigen::Index a = 0; a < k; ++a)
        if (beta(a) > 0.0) nonzero.push_back(a);
      if (!nonzero.empty()) {
        Vector sub(static_cast<Eigen::Index>(nonzero.size()));
        for (std::size_t i = 0; i < nonzero.size(); ++i)
          sub(static_cast<Eigen::Index>(i)) = beta(nonzero[i]);
        const Vector projected = simplex_project(sub);
        for (std::size_t i = 0; i < nonzero.size(); ++i)
          beta(nonzero[i]) = projected(static_cast<Eigen::Index>(i));
      }
    }
    out.matrix.row(j) = beta.transpose();
  }

  out.support_sizes.resize(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j)
    out.support_sizes[static_cast<std::size_t>(j)] =
        static_cast<std::size_t>((out.matrix.row(j).array() != 0.0).count());
  return out;
}

LoadingEstimate lsp(const Tpdm& tpdm, const PureVarResult& purevar, const LspConfig& config) {
  return lsp(tpdm.matrix, purevar, config);
}

}  // namespace tailfactor
