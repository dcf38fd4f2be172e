#include "tailfactor/family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "tailfactor/error.hpp"

namespace tailfactor {

SubsetFamily SubsetFamily::explicit_sets(std::vector<std::vector<std::size_t>> sets) {
  if (sets.empty()) throw StructuralError("subset family is empty");
  for (const auto& s : sets) {
    if (s.empty()) throw StructuralError("subset family contains an empty set");
  }
  return SubsetFamily(ExplicitFamily{std::move(sets)});
}

SubsetFamily SubsetFamily::capacity(std::vector<double> weights, double alpha) {
  if (weights.empty()) throw ParameterError("capacity weights are empty");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0)
      throw ParameterError("capacity weights must be finite and nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ParameterError("capacity weights must sum to 1 (got " + std::to_string(total) +
                         ")");
  if (!(alpha > 0.0) || alpha > 1.0)
    throw ParameterError("capacity level alpha must lie in (0, 1]");
  for (double& w : weights) w /= total;
  return SubsetFamily(CapacityFamily{std::move(weights), alpha});
}

SubsetFamily SubsetFamily::fraction(std::size_t d, double alpha) {
  if (d == 0) throw StructuralError("dimension must be positive");
  return capacity(std::vector<double>(d, 1.0 / static_cast<double>(d)), alpha);
}

void SubsetFamily::check_dimension(std::size_t d) const {
  if (const auto* e = as_explicit()) {
    for (const auto& s : e->sets)
      for (std::size_t j : s)
        if (j >= d) throw StructuralError("subset index out of range");
  } else if (as_capacity()->weights.size() != d) {
    throw StructuralError("capacity weight count does not match dimension");
  }
}

bool SubsetFamily::covered_by(std::span<const bool> exceeds) const {
  if (const auto* e = as_explicit()) {
    return std::any_of(e->sets.begin(), e->sets.end(), [&](const auto& s) {
      return std::all_of(s.begin(), s.end(), [&](std::size_t j) { return exceeds[j]; });
    });
  }
  const auto& c = *as_capacity();
  double mass = 0.0;
  for (std::size_t j = 0; j < exceeds.size(); ++j)
    if (exceeds[j]) mass += c.weights[j];
  return mass >= c.alpha - kCapacityTolerance;
}

namespace {

// Walks v in the given order until the capacity reaches alpha.
template <typename Compare>
double capacity_prefix_value(std::span<const double> v, const CapacityFamily& c,
                             Compare before) {
  if (c.weights.size() != v.size())
    throw StructuralError("capacity weight count does not match vector length");
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return before(v[a], v[b]); });
  double cumulative = 0.0;
  for (std::size_t j : order) {
    cumulative += c.weights[j];
    if (cumulative >= c.alpha - kCapacityTolerance) return v[j];
  }
  throw ParameterError("capacity level alpha exceeds the total weight");
}

}  // namespace

double family_max_min(std::span<const double> v, const SubsetFamily& family) {
  if (const auto* e = family.as_explicit()) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& s : e->sets) {
      double m = std::numeric_limits<double>::infinity();
      for (std::size_t j : s) {
        if (j >= v.size()) throw StructuralError("subset index out of range");
        m = std::min(m, v[j]);
      }
      best = std::max(best, m);
    }
    return best;
  }
  return capacity_prefix_value(v, *family.as_capacity(),
                               [](double a, double b) { return a > b; });
}

double family_min_max(std::span<const double> v, const SubsetFamily& family) {
  if (const auto* e = family.as_explicit()) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : e->sets) {
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t j : s) {
        if (j >= v.size()) throw StructuralError("subset index out of range");
        m = std::max(m, v[j]);
      }
      best = std::min(best, m);
    }
    return best;
  }
  return capacity_prefix_value(v, *family.as_capacity(),
                               [](double a, double b) { return a < b; });
}

}  // namespace tailfactor
