#pragma once

// Collections of coordinate subsets and the max-min / min-max functionals over
// them.

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace tailfactor {

/// Capacity sums are compared against alpha with this slack so that, e.g., ten
/// weights of 0.1 reach alpha = 0.8 after eight of them.
inline constexpr double kCapacityTolerance = 1e-12;

struct ExplicitFamily {
  std::vector<std::vector<std::size_t>> sets;  // 0-based coordinate indices
};

/// All subsets J with sum_{j in J} weights[j] >= alpha.
struct CapacityFamily {
  std::vector<double> weights;
  double alpha = 1.0;
};

class SubsetFamily {
 public:
  /// Throws StructuralError on an empty family or an empty member set.
  static SubsetFamily explicit_sets(std::vector<std::vector<std::size_t>> sets);
  /// Throws ParameterError unless weights are nonnegative, sum to one within
  /// 1e-9, and alpha lies in (0, 1].
  static SubsetFamily capacity(std::vector<double> weights, double alpha);
  /// Uniform weights 1/d: subsets holding at least a fraction alpha of indices.
  static SubsetFamily fraction(std::size_t d, double alpha);

  bool is_explicit() const noexcept {
    return std::holds_alternative<ExplicitFamily>(variant_);
  }
  const ExplicitFamily* as_explicit() const noexcept {
    return std::get_if<ExplicitFamily>(&variant_);
  }
  const CapacityFamily* as_capacity() const noexcept {
    return std::get_if<CapacityFamily>(&variant_);
  }

  /// Throws StructuralError if an index is out of range or weight count != d.
  void check_dimension(std::size_t d) const;

  /// Whether the set of exceeding coordinates contains some member J.
  bool covered_by(std::span<const bool> exceeds) const;

 private:
  explicit SubsetFamily(std::variant<ExplicitFamily, CapacityFamily> v)
      : variant_(std::move(v)) {}

  std::variant<ExplicitFamily, CapacityFamily> variant_;
};

/// max over J of min over j in J of v[j].
///
/// For capacity families: sort v descending (ties keep index order), take the
/// first prefix whose capacity reaches alpha and return its last value. Throws
/// ParameterError when alpha exceeds the total weight.
double family_max_min(std::span<const double> v, const SubsetFamily& family);

/// min over J of max over j in J of v[j]; the dual, used for intersections of
/// unions.
double family_min_max(std::span<const double> v, const SubsetFamily& family);

}  // namespace tailfactor
