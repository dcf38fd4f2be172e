#pragma once

// End-to-end commands behind the command-line tool. Each command reads its
// inputs, writes report files into an output directory together with a
// manifest.json recording the fully resolved options, and can be replayed from
// that manifest.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tailfactor/risk.hpp"
#include "tailfactor/tpdm.hpp"

namespace tailfactor {

inline constexpr const char* kToolVersion = "0.1.0";

struct SimulateOptions {
  std::string model;  // plain-text model configuration
  std::size_t n = 1000;
  std::optional<std::uint64_t> seed;  // overrides the configuration's seed
};

struct TpdmOptions {
  std::string data;
  std::optional<std::size_t> k;        // default: 5% of n
  std::optional<std::size_t> k_prime;  // default: k
  std::string norm = "max";
  bool lower_tail = false;
};

struct FitOptions {
  std::string data;
  std::optional<std::size_t> k;
  std::optional<std::size_t> k_prime;
  std::optional<std::size_t> k_margin;
  std::string norm = "max";
  std::vector<double> kappa_grid;   // empty: default grid
  std::vector<double> lambda_grid;  // empty: default grid
  std::string projection = "both";  // both | on | off
  bool lower_tail = false;
  std::size_t fista_max_iter = 5000;
  double fista_tol = 1e-8;
  bool post_lasso = true;
};

struct RiskOptions {
  FitOptions fit;
  std::string model;  // model.json from a previous fit; empty fits first
  std::vector<double> alphas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> thresholds;  // each value broadcast to all coordinates
  std::string thresholds_file;     // one vector of thresholds
  std::string weights;             // capacity weights; empty: uniform
};

struct BootstrapOptions {
  RiskOptions risk;
  std::string estimator = "empirical";  // empirical | model
  std::size_t replicates = 999;
  double beta = 0.05;
  std::uint64_t seed = 1;
};

struct WindOptions {
  std::string input;          // 10 m speeds
  std::string paired_lower;   // paired series at the reference height
  std::string paired_upper;   // paired series at paired_height
  std::optional<double> exponent;
  double reference_height = 10.0;
  double target_height = 100.0;
  double paired_height = 100.0;
  bool group_hour_month = true;
  bool daily_maxima = false;
  std::vector<int> months;
};

using Command = std::variant<SimulateOptions, TpdmOptions, FitOptions, RiskOptions,
                             BootstrapOptions, WindOptions>;

std::string command_name(const Command& command);

struct RunResult {
  std::vector<std::string> outputs;  // file names inside the output directory
  std::vector<std::string> warnings;
};

/// Runs a command, writing reports and manifest.json into `out_dir` (created
/// if needed). On failure every file written by this run is removed and the
/// error is rethrown with the failing stage in its message.
RunResult run_command(const Command& command, const std::string& out_dir);

/// Replays the command recorded in a manifest, into `out_dir` or, when empty,
/// into the directory recorded there.
RunResult rerun_manifest(const std::string& manifest_path, const std::string& out_dir = "");

/// k = k' = k(j) default: 5% of n, kept inside [10, n - 1].
std::size_t default_threshold_count(std::size_t n);

/// Selection settings with defaults filled in for a sample of size n.
SelectionSettings resolve_selection(const FitOptions& options, std::size_t n);

/// Hyperparameter selection followed by per-coordinate GPD fits.
FittedTailModel fit_tail_model(const DataMatrix& data, const SelectionSettings& settings,
                               std::size_t k_margin, SelectionResult* selection = nullptr,
                               std::vector<std::string>* warnings = nullptr);

std::vector<MarginModel> fit_margins(const DataMatrix& data, std::size_t k_margin,
                                     std::vector<std::string>* warnings = nullptr);

/// JSON form of a fitted model. Empirical CDFs are not stored; reading needs
/// the (already transformed) data they were built from.
std::string fitted_model_to_json(const FittedTailModel& model, bool lower_tail);
FittedTailModel fitted_model_from_json(const std::string& text, const DataMatrix& data,
                                       bool* lower_tail = nullptr);

/// Joint probabilities over an (alpha, threshold) grid, on the original scale.
struct RiskRow {
  double alpha = 0.0;
  std::string threshold;  // the broadcast value, or "file"
  double p_model = 0.0;
  double p_empirical = 0.0;
  bool clipped = false;
};

}  // namespace tailfactor
