#pragma once

#include <span>
#include <string>
#include <vector>

namespace tailfactor {

/// A norm on R^d used for radii of pseudo-observations and for the TPDM.
class Norm {
 public:
  enum class Kind { One, Two, Max, WeightedOne };

  static Norm one() { return Norm(Kind::One, {}); }
  static Norm two() { return Norm(Kind::Two, {}); }
  static Norm max() { return Norm(Kind::Max, {}); }
  /// Throws ParameterError unless every weight is finite and strictly positive.
  static Norm weighted_one(std::vector<double> weights);

  /// Accepts "one", "two", "max" (aliases "l1", "l2", "inf", "maximum").
  static Norm parse(const std::string& name);

  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::string name() const;

  /// Throws StructuralError if a weighted norm is evaluated on a vector of the
  /// wrong length.
  double operator()(std::span<const double> x) const;

  friend bool operator==(const Norm&, const Norm&) = default;

 private:
  Norm(Kind kind, std::vector<double> weights)
      : kind_(kind), weights_(std::move(weights)) {}

  Kind kind_;
  std::vector<double> weights_;
};

}  // namespace tailfactor
