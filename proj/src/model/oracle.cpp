#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "tailfactor/error.hpp"
#include "tailfactor/model.hpp"
#include "tailfactor/simd/kernels.hpp"

namespace tailfactor {

namespace {

void check_point(const FactorModel& model, std::span<const double> x) {
  if (x.size() != model.d())
    throw StructuralError("point has length " + std::to_string(x.size()) + ", expected " +
                          std::to_string(model.d()));
  for (double v : x)
    if (!std::isfinite(v) || v < 0.0)
      throw ParameterError("point must be finite and nonnegative");
}

SpectralSample oracle_sample(const FactorModel& model, const OracleOptions& options) {
  return model.spectral().integration_sample(options.mc_draws, options.seed);
}

// A z for every atom, one row each.
Matrix push_atoms(const Matrix& a, const Matrix& atoms) {
  const auto& kt = simd::kernels();
  Matrix out(atoms.rows(), a.rows());
  for (Eigen::Index i = 0; i < atoms.rows(); ++i)
    kt.matvec(a.data(), static_cast<std::size_t>(a.rows()),
              static_cast<std::size_t>(a.cols()), atoms.data() + i * atoms.cols(),
              out.data() + i * out.cols());
  return out;
}

}  // namespace

double stdf_oracle(const FactorModel& model, std::span<const double> x,
                   const OracleOptions& options) {
  check_point(model, x);
  const SpectralSample s = oracle_sample(model, options);
  const Matrix pushed = push_atoms(model.loading().entries(), s.atoms);
  const auto& kt = simd::kernels();
  const std::size_t d = model.d();
  std::vector<double> v(d);
  double total = 0.0;
  for (Eigen::Index i = 0; i < pushed.rows(); ++i) {
    std::copy_n(pushed.data() + i * pushed.cols(), d, v.begin());
    kt.multiply_inplace(v.data(), x.data(), d);
    total += s.weights(i) * kt.max_value(v.data(), d);
  }
  return static_cast<double>(model.K()) * total;
}

double tail_functional_oracle(const FactorModel& model, const SubsetFamily& family,
                              std::span<const double> x, TailMode mode,
                              const OracleOptions& options) {
  check_point(model, x);
  family.check_dimension(model.d());
  const SpectralSample s = oracle_sample(model, options);
  const Matrix pushed = push_atoms(model.loading().entries(), s.atoms);
  const auto& kt = simd::kernels();
  const std::size_t d = model.d();
  std::vector<double> v(d);
  double total = 0.0;
  for (Eigen::Index i = 0; i < pushed.rows(); ++i) {
    std::copy_n(pushed.data() + i * pushed.cols(), d, v.begin());
    kt.multiply_inplace(v.data(), x.data(), d);
    const double value = mode == TailMode::UnionOfIntersections ? family_max_min(v, family)
                                                                : family_min_max(v, family);
    total += s.weights(i) * value;
  }
  return static_cast<double>(model.K()) * total;
}

TpdmOracle tpdm_oracle(const FactorModel& model, const Norm& norm,
                       const OracleOptions& options) {
  const SpectralSample s = oracle_sample(model, options);
  const Matrix& a = model.loading().entries();
  const Matrix pushed = push_atoms(a, s.atoms);
  const auto& kt = simd::kernels();
  const auto k = s.atoms.cols();
  Matrix latent = Matrix::Zero(k, k);
  double normalizer = 0.0;
  for (Eigen::Index i = 0; i < s.atoms.rows(); ++i) {
    const double r = norm(row_span(pushed, i));
    normalizer += s.weights(i) * r;
    kt.outer_upper_accumulate(s.atoms.data() + i * k, static_cast<std::size_t>(k),
                              s.weights(i) / r, latent.data());
  }
  latent /= normalizer;
  latent.triangularView<Eigen::StrictlyLower>() = latent.transpose();

  Matrix sigma = a * latent * a.transpose();
  sigma.triangularView<Eigen::StrictlyLower>() = sigma.transpose();
  TpdmOracle out{std::move(latent), normalizer, Tpdm{}};
  out.sigma.matrix = std::move(sigma);
  out.sigma.norm = norm;
  return out;
}

SpectralSample sample_spectral_dependence(const FactorModel& model, const Norm& norm,
                                          std::size_t m, std::uint64_t seed) {
  if (m == 0) throw ParameterError("sample count must be positive");
  const SpectralSample s = model.spectral().integration_sample(m, seed);
  SpectralSample out;
  out.atoms = push_atoms(model.loading().entries(), s.atoms);
  out.weights.resize(out.atoms.rows());
  double total = 0.0;
  for (Eigen::Index i = 0; i < out.atoms.rows(); ++i) {
    const double r = norm(row_span(out.atoms, i));
    out.atoms.row(i) /= r;
    out.weights(i) = s.weights(i) * r;
    total += out.weights(i);
  }
  out.weights /= total;
  out.effective_count = out.size();
  return out;
}

namespace {

// Minimum-cost perfect assignment on a square cost matrix (row i -> column
// result[i]). Shortest augmenting path with potentials, O(n^3).
std::vector<std::size_t> hungarian(const Eigen::MatrixXd& cost) {
  const auto n = static_cast<std::size_t>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(static_cast<Eigen::Index>(i0 - 1),
                                static_cast<Eigen::Index>(j - 1)) -
                           u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> result(n);
  for (std::size_t j = 1; j <= n; ++j) result[p[j] - 1] = j - 1;
  return result;
}

double bottleneck(const Eigen::MatrixXd& dist, const std::vector<std::size_t>& perm) {
  double worst = 0.0;
  for (std::size_t a = 0; a < perm.size(); ++a)
    worst = std::max(worst, dist(static_cast<Eigen::Index>(a),
                                 static_cast<Eigen::Index>(perm[a])));
  return worst;
}

}  // namespace

Alignment align_loading(const Matrix& estimate, const Matrix& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
    throw StructuralError("loading matrices differ in shape");
  const auto k = truth.cols();
  // dist(a, b): truth column a against estimate column b.
  Eigen::MatrixXd dist(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b)
      dist(a, b) = (truth.col(a) - estimate.col(b)).cwiseAbs().maxCoeff();

  Alignment out;
  std::vector<std::size_t> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  if (k <= 8) {
    out.permutation = perm;
    out.max_abs_error = bottleneck(dist, perm);
    while (std::next_permutation(perm.begin(), perm.end())) {
      const double e = bottleneck(dist, perm);
      if (e < out.max_abs_error) {
        out.max_abs_error = e;
        out.permutation = perm;
      }
    }
    return out;
  }

  // Bottleneck value by bisection over the sorted distances, each step a 0/1
  // assignment; then a sum-optimal assignment among the admissible pairs.
  std::vector<double> levels(dist.data(), dist.data() + dist.size());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  auto admissible = [&](double t) {
    Eigen::MatrixXd c = (dist.array() > t).cast<double>();
    return bottleneck(dist, hungarian(c)) <= t;
  };
  std::size_t lo = 0, hi = levels.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (admissible(levels[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  const double t = levels[lo];
  const double big = 1.0 + static_cast<double>(k) * (levels.back() + 1.0);
  Eigen::MatrixXd c = dist;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    if (c.data()[i] > t) c.data()[i] = big;
  out.permutation = hungarian(c);
  out.max_abs_error = bottleneck(dist, out.permutation);
  return out;
}

}  // namespace tailfactor
