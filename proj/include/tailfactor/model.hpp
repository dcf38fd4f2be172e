#pragma once

// Generative latent linear factor model for tail dependence: parameter
// validation, simulation, and exact or Monte-Carlo evaluation of the STDF,
// tail functionals, and the TPDM.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tailfactor/family.hpp"
#include "tailfactor/linalg.hpp"
#include "tailfactor/norm.hpp"
#include "tailfactor/rng.hpp"
#include "tailfactor/spectral_sample.hpp"
#include "tailfactor/tpdm.hpp"

namespace tailfactor {

inline constexpr double kRowSumTolerance = 1e-9;
inline constexpr double kRankTolerance = 1e-10;
inline constexpr double kPureTolerance = 1e-9;

/// d x K loading matrix. Construction only checks finiteness; the structural
/// invariants are reported by `violations()`.
class LoadingMatrix {
 public:
  explicit LoadingMatrix(Matrix entries);

  const Matrix& entries() const noexcept { return entries_; }
  std::size_t d() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t K() const noexcept { return static_cast<std::size_t>(entries_.cols()); }

  /// Entries in [0,1], unit row sums, full column rank, and (optionally) a
  /// unit-vector row for every column.
  std::vector<std::string> violations(bool require_pure = true) const;

  /// Rows equal to e_a, grouped by a. Entry a may be empty.
  std::vector<std::vector<std::size_t>> pure_sets() const;

 private:
  Matrix entries_;
};

class FactorSpectralSpec;

/// Mass 1/K at every unit vector: independent factors.
struct DiscreteUnitAtoms {
  std::size_t dim = 1;
};

struct AtomList {
  Matrix atoms;  // one atom per row
  Vector weights;
};

struct SymmetricDirichlet {
  std::size_t dim = 1;
  double concentration = 1.0;
};

struct Mixture {
  std::vector<double> probabilities;
  std::vector<FactorSpectralSpec> components;
};

/// Law of the latent angular vector on the 1-norm unit simplex in R^K.
class FactorSpectralSpec {
 public:
  using Variant = std::variant<DiscreteUnitAtoms, AtomList, SymmetricDirichlet, Mixture>;

  FactorSpectralSpec(Variant v);  // NOLINT(google-explicit-constructor)
  FactorSpectralSpec(DiscreteUnitAtoms s) : FactorSpectralSpec(Variant(s)) {}  // NOLINT
  FactorSpectralSpec(AtomList s) : FactorSpectralSpec(Variant(std::move(s))) {}  // NOLINT
  FactorSpectralSpec(SymmetricDirichlet s) : FactorSpectralSpec(Variant(s)) {}  // NOLINT
  FactorSpectralSpec(Mixture s) : FactorSpectralSpec(Variant(std::move(s))) {}  // NOLINT

  const Variant& variant() const noexcept { return variant_; }
  std::size_t dim() const;

  /// True when the measure has finitely many atoms.
  bool is_atomic() const;

  /// Exact atom representation; nullopt for continuous measures.
  std::optional<SpectralSample> exact_atoms() const;

  /// Closed-form mean and second moment sum E[Z Z^T].
  Vector mean() const;
  Matrix second_moment() const;

  Vector draw(Rng& rng) const;

  /// Exact atoms when available, otherwise `mc_draws` equally weighted draws.
  /// Throws ConfigurationError for a continuous measure without a draw count.
  SpectralSample integration_sample(std::optional<std::size_t> mc_draws,
                                    std::uint64_t seed) const;

  /// Problems with the specification itself (atoms off the simplex, weights
  /// not summing to one, nonpositive concentration, ...).
  std::vector<std::string> violations() const;

 private:
  Variant variant_;
};

class FactorModel {
 public:
  /// Throws StructuralError when loading.K() != spectral.dim().
  FactorModel(LoadingMatrix loading, FactorSpectralSpec spectral);

  const LoadingMatrix& loading() const noexcept { return loading_; }
  const FactorSpectralSpec& spectral() const noexcept { return spectral_; }
  std::size_t d() const noexcept { return loading_.d(); }
  std::size_t K() const noexcept { return loading_.K(); }

 private:
  LoadingMatrix loading_;
  FactorSpectralSpec spectral_;
};

struct ValidationOptions {
  std::size_t mc_draws = 20000;  // only for continuous measures
  std::uint64_t seed = 1;
};

struct ValidationReport {
  std::vector<std::string> violations;
  /// Whether int z z^T / |z|_inf psi(dz) is diagonally dominant and positive
  /// definite, which makes the maximum norm a valid choice for recovery.
  bool max_norm_condition = false;

  bool ok() const noexcept { return violations.empty(); }
  bool has(const std::string& needle) const;
};

/// Smallest min(C(a,a), C(b,b)) - |C(a,b)| over a != b; +inf when K = 1.
double diagonal_dominance(const Matrix& c);

ValidationReport validate_model(const FactorModel& model,
                                const ValidationOptions& options = {});

struct SyntheticSample {
  Matrix data;  // n x d
  std::uint64_t seed = 0;
};

/// Rows Y = A Z with Z = K R Lambda, R standard Pareto, Lambda ~ psi.
SyntheticSample simulate(const FactorModel& model, std::size_t n, std::uint64_t seed);

struct OracleOptions {
  std::optional<std::size_t> mc_draws;
  std::uint64_t seed = 0;
};

/// L(x) = K int max_j x_j (A z)_j psi(dz).
double stdf_oracle(const FactorModel& model, std::span<const double> x,
                   const OracleOptions& options = {});

enum class TailMode { UnionOfIntersections, IntersectionOfUnions };

/// K int max_J min_{j in J} (A z)_j x_j psi(dz), or the min-max dual.
double tail_functional_oracle(const FactorModel& model, const SubsetFamily& family,
                              std::span<const double> x, TailMode mode,
                              const OracleOptions& options = {});

struct TpdmOracle {
  Matrix latent;      // C = c^{-1} int z z^T / |A z| psi(dz)
  double normalizer;  // c = int |A z| psi(dz)
  Tpdm sigma;         // A C A^T
};

TpdmOracle tpdm_oracle(const FactorModel& model, const Norm& norm,
                       const OracleOptions& options = {});

/// Spectral dependence measure on the sphere of `norm`: push z ~ psi through
/// A z / |A z| with weights proportional to |A z|. Atomic measures are pushed
/// forward exactly (m is then ignored); continuous ones are sampled m times.
SpectralSample sample_spectral_dependence(const FactorModel& model, const Norm& norm,
                                          std::size_t m, std::uint64_t seed);

struct Alignment {
  std::vector<std::size_t> permutation;  // estimate column matched to truth column a
  double max_abs_error = 0.0;
};

/// Column permutation of `estimate` closest to `truth` in max-abs entry
/// distance: exhaustive for K <= 8, Hungarian assignment beyond.
Alignment align_loading(const Matrix& estimate, const Matrix& truth);

/// Plain-text model description; see README for the key reference.
struct ModelConfig {
  FactorModel model;
  std::uint64_t seed = 0;
};

ModelConfig parse_model_config(const std::string& text);
std::string format_model_config(const FactorModel& model, std::uint64_t seed);

}  // namespace tailfactor
