#include "tailfactor/norm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "tailfactor/error.hpp"
#include "tailfactor/simd/kernels.hpp"

namespace tailfactor {

Norm Norm::weighted_one(std::vector<double> weights) {
  if (weights.empty()) throw ParameterError("weighted 1-norm needs at least one weight");
  for (double w : weights) {
    if (!std::isfinite(w) || w <= 0.0)
      throw ParameterError("weighted 1-norm weights must be strictly positive");
  }
  return Norm(Kind::WeightedOne, std::move(weights));
}

Norm Norm::parse(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "one" || s == "l1" || s == "1") return one();
  if (s == "two" || s == "l2" || s == "2") return two();
  if (s == "max" || s == "maximum" || s == "inf") return max();
  throw ParameterError("unknown norm '" + name + "' (expected one, two or max)");
}

std::string Norm::name() const {
  switch (kind_) {
    case Kind::One:
      return "one";
    case Kind::Two:
      return "two";
    case Kind::Max:
      return "max";
    case Kind::WeightedOne:
      return "weighted-one";
  }
  return "unknown";
}

double Norm::operator()(std::span<const double> x) const {
  const auto& k = simd::kernels();
  switch (kind_) {
    case Kind::One:
      return k.sum_abs(x.data(), x.size());
    case Kind::Two:
      return std::sqrt(k.sum_squares(x.data(), x.size()));
    case Kind::Max:
      return k.max_abs(x.data(), x.size());
    case Kind::WeightedOne:
      if (x.size() != weights_.size())
        throw StructuralError("weighted norm length mismatch");
      return k.weighted_sum_abs(weights_.data(), x.data(), x.size());
  }
  return 0.0;
}

}  // namespace tailfactor
