#include "tailfactor/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "tailfactor/error.hpp"

namespace tailfactor {

double gpd_cdf(double y, double xi, double sigma) {
  if (y <= 0.0) return 0.0;
  if (std::abs(xi) < kGpdExponentialBand) return -std::expm1(-y / sigma);
  const double base = 1.0 + xi * y / sigma;
  if (base <= 0.0) return 1.0;
  return 1.0 - std::pow(base, -1.0 / xi);
}

double gpd_loglik(std::span<const double> excesses, double xi, double sigma) {
  if (!(sigma > 0.0)) return -std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(excesses.size());
  if (std::abs(xi) < kGpdExponentialBand) {
    double total = 0.0;
    for (double y : excesses) total += y;
    return -n * std::log(sigma) - total / sigma;
  }
  double total = 0.0;
  for (double y : excesses) {
    const double base = 1.0 + xi * y / sigma;
    if (base <= 0.0) return -std::numeric_limits<double>::infinity();
    total += std::log1p(xi * y / sigma);
  }
  return -n * std::log(sigma) - (1.0 / xi + 1.0) * total;
}

namespace {

// Profile of the likelihood along eta = xi / sigma.
struct Profile {
  std::span<const double> y;
  double mean = 0.0;

  double xi(double eta) const {
    double total = 0.0;
    for (double v : y) total += std::log1p(eta * v);
    return total / static_cast<double>(y.size());
  }

  // Returns (xi, sigma, loglik).
  void evaluate(double eta, double& xi_out, double& sigma_out, double& ll) const {
    const double n = static_cast<double>(y.size());
    if (eta == 0.0) {
      xi_out = 0.0;
      sigma_out = mean;
      ll = -n * (std::log(mean) + 1.0);
      return;
    }
    xi_out = xi(eta);
    sigma_out = xi_out / eta;
    ll = -n * (std::log(sigma_out) + 1.0 + xi_out);
  }

  double loglik(double eta) const {
    double a = 0.0, b = 0.0, ll = 0.0;
    evaluate(eta, a, b, ll);
    return std::isfinite(ll) ? ll : -std::numeric_limits<double>::infinity();
  }
};

}  // namespace

GpdFit gpd_mle(std::span<const double> excesses) {
  if (excesses.size() < kGpdMinExcesses)
    throw EstimationError("GPD fit needs at least " + std::to_string(kGpdMinExcesses) +
                          " excesses (got " + std::to_string(excesses.size()) + ")");
  double ymax = 0.0;
  double total = 0.0;
  for (double y : excesses) {
    if (!std::isfinite(y) || y <= 0.0) throw InputError("GPD excesses must be positive");
    ymax = std::max(ymax, y);
    total += y;
  }
  Profile profile{excesses, total / static_cast<double>(excesses.size())};
  const bool degenerate = std::all_of(excesses.begin(), excesses.end(),
                                      [&](double y) { return y == excesses.front(); });

  // xi(eta) increases from -inf at eta = -1/ymax; find where it crosses -1/2.
  double lo = -1.0 / ymax;
  double hi = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (profile.xi(mid) > kGpdMinShape)
      hi = mid;
    else
      lo = mid;
  }
  const double eta_floor = hi;

  std::vector<double> grid;
  grid.push_back(eta_floor);
  for (int i = 0; i < 200; ++i) {
    const double delta = std::pow(10.0, -8.0 + 8.0 * static_cast<double>(i) / 200.0);
    const double eta = -(1.0 - delta) / ymax;
    if (eta > eta_floor) grid.push_back(eta);
  }
  grid.push_back(0.0);
  for (int i = 0; i < 200; ++i) {
    const double s = -6.0 + 12.0 * static_cast<double>(i) / 199.0;
    grid.push_back(std::pow(10.0, s) / ymax);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::size_t best = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double ll = profile.loglik(grid[i]);
    if (ll > best_ll) {
      best_ll = ll;
      best = i;
    }
  }

  double eta = grid[best];
  bool interior = best > 0 && best + 1 < grid.size();
  if (interior) {
    std::uintmax_t max_iter = 500;
    const auto [arg, value] = boost::math::tools::brent_find_minima(
        [&](double e) { return -profile.loglik(e); }, grid[best - 1], grid[best + 1],
        std::numeric_limits<double>::digits / 2, max_iter);
    if (-value >= best_ll) eta = arg;
  }

  GpdFit fit;
  fit.excess_count = excesses.size();
  double ll = 0.0;
  profile.evaluate(eta, fit.xi, fit.sigma, ll);
  fit.converged = interior && !degenerate && std::isfinite(ll) && fit.sigma > 0.0;
  return fit;
}

Ecdf::Ecdf(std::vector<double> values) : sorted_(std::move(values)) {
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const {
  const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
  return static_cast<double>(count) / (static_cast<double>(sorted_.size()) + 1.0);
}

double tail_prob(double x, const GpdFit& fit, const Ecdf& ecdf) {
  if (x <= fit.threshold) return 1.0 - ecdf(x);
  const double rate = static_cast<double>(fit.k) / static_cast<double>(fit.n);
  return rate * (1.0 - gpd_cdf(x - fit.threshold, fit.xi, fit.sigma));
}

double gpd_return_level(double p, const GpdFit& fit) {
  const double rate = static_cast<double>(fit.k) / static_cast<double>(fit.n);
  if (!(p > 0.0) || p > rate)
    throw ParameterError("return level needs 0 < p <= k/n");
  const double ratio = p / rate;
  if (std::abs(fit.xi) < kGpdExponentialBand) return fit.threshold - fit.sigma * std::log(ratio);
  return fit.threshold + fit.sigma / fit.xi * (std::pow(ratio, -fit.xi) - 1.0);
}

FitMarginResult fit_margin(std::span<const double> column, std::size_t k) {
  const std::size_t n = column.size();
  if (k < kGpdMinExcesses || k >= n)
    throw ParameterError("marginal threshold count must satisfy 10 <= k < n (k = " +
                         std::to_string(k) + ", n = " + std::to_string(n) + ")");
  std::vector<double> sorted(column.begin(), column.end());
  for (double v : sorted)
    if (!std::isfinite(v)) throw InputError("column has non-finite values");
  std::sort(sorted.begin(), sorted.end());
  const double u = sorted[n - k - 1];
  std::vector<double> excesses;
  excesses.reserve(k);
  FitMarginResult out;
  for (std::size_t i = n - k; i < n; ++i) {
    const double e = sorted[i] - u;
    if (e > 0.0)
      excesses.push_back(e);
    else
      ++out.dropped_ties;
  }
  out.fit = gpd_mle(excesses);
  out.fit.threshold = u;
  out.fit.k = k;
  out.fit.n = n;
  return out;
}

}  // namespace tailfactor
