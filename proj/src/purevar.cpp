#include "tailfactor/purevar.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <string>

#include "tailfactor/error.hpp"

namespace tailfactor {

namespace {

void check_square_symmetric(const Matrix& s) {
  if (s.rows() != s.cols() || s.rows() == 0)
    throw StructuralError("TPDM must be a nonempty square matrix");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if (!s.allFinite()) throw InputError("TPDM has non-finite entries");
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw StructuralError("TPDM is not symmetric");
}

bool intersects(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j)
      ++i;
    else
      ++j;
  }
  return false;
}

std::vector<std::size_t> set_union(const std::vector<std::size_t>& a,
                                   const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

PureVarResult pure_var(const Matrix& sigma, double kappa) {
  check_square_symmetric(sigma);
  if (!std::isfinite(kappa) || kappa <= 0.0)
    throw ParameterError("kappa must be positive (got " + std::to_string(kappa) + ")");
  const auto d = static_cast<std::size_t>(sigma.rows());
  const double tol = 2.0 * kappa;

  std::vector<double> m(d);
  for (std::size_t j = 0; j < d; ++j) m[j] = sigma.row(static_cast<Eigen::Index>(j)).maxCoeff();

  PureVarResult out;
  out.kappa = kappa;
  for (std::size_t j = 0; j < d; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    std::vector<std::size_t> s_j;
    for (std::size_t l = 0; l < d; ++l)
      if (m[j] - sigma(jj, static_cast<Eigen::Index>(l)) <= tol) s_j.push_back(l);

    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t l : s_j) worst = std::max(worst, m[l] - sigma(jj, static_cast<Eigen::Index>(l)));
    if (!(worst <= tol)) continue;

    std::size_t target = out.partition.size();
    for (std::size_t p = 0; p < out.partition.size();) {
      if (!intersects(out.partition[p], s_j)) {
        ++p;
        continue;
      }
      if (target == out.partition.size()) {
        target = p;
        out.partition[p] = set_union(out.partition[p], s_j);
        ++p;
      } else {
        out.partition[target] = set_union(out.partition[target], out.partition[p]);
        out.partition.erase(out.partition.begin() + static_cast<std::ptrdiff_t>(p));
      }
    }
    if (target == out.partition.size()) out.partition.push_back(std::move(s_j));
  }

  out.K_hat = out.partition.size();
  for (const auto& set : out.partition) out.pure = set_union(out.pure, set);
  return out;
}

PureVarResult pure_var(const Tpdm& tpdm, double kappa) { return pure_var(tpdm.matrix, kappa); }

std::vector<double> kappa_grid_default() {
  std::vector<double> grid;
  for (int i = 0; i <= 12; ++i) grid.push_back(static_cast<double>(4 + i) * 0.0005);
  return grid;
}

std::vector<double> kappa_grid(const std::vector<double>* user) {
  if (user == nullptr) return kappa_grid_default();
  if (user->empty()) throw ParameterError("kappa grid is empty");
  for (double k : *user)
    if (!std::isfinite(k) || k <= 0.0) throw ParameterError("kappa grid values must be positive");
  return *user;
}

}  // namespace tailfactor
