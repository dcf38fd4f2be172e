#pragma once

// Power-law extrapolation of wind speeds from the 10 m reference height to hub
// height, with exponents optionally estimated from paired-height data and
// averaged by hour of day and month.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tailfactor/linalg.hpp"

namespace tailfactor {

/// v_ref (h / h_ref)^alpha. Throws InputError for a nonpositive speed or height.
double hellmann_extrapolate(double v_ref, double alpha, double h, double h_ref = 10.0);

/// (ln v_h - ln v_ref) / (ln h - ln h_ref). Throws InputError for nonpositive
/// speeds and ParameterError when h == h_ref.
double hellmann_exponent(double v_ref, double v_h, double h, double h_ref = 10.0);

struct Timestamp {
  int year = 0;
  int month = 1;
  int day = 1;
  int hour = 0;

  friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

/// Accepts "YYYY-MM-DD", "YYYY-MM-DD HH[:MM[:SS]]" and the same with 'T'.
Timestamp parse_timestamp(const std::string& text);
std::string format_timestamp(const Timestamp& t, bool with_hour);

/// Time-indexed speed table: CSV with a header whose first column is the time.
struct WindSeries {
  std::vector<std::string> names;  // speed column names
  std::vector<Timestamp> times;
  Matrix speeds;                   // rows follow `times`, m/s
};

WindSeries parse_wind_csv(const std::string& text, const std::string& source = "<input>");
std::string format_wind_csv(const WindSeries& series, bool with_hour);

struct WindPreprocessConfig {
  double reference_height = 10.0;
  double target_height = 100.0;
  std::optional<double> fixed_exponent;  // otherwise estimated from paired data
  double paired_height = 100.0;          // height of the paired upper series
  bool group_hour_month = true;          // average exponents per (hour, month)
  bool daily_maxima = false;
  std::vector<int> months;               // keep only these months; empty keeps all
};

/// Exponent table per (month, hour) for each paired column; NaN where no data.
using ExponentTable = std::vector<std::array<std::array<double, 24>, 12>>;

ExponentTable hour_month_exponents(const WindSeries& lower, const WindSeries& upper,
                                   double h, double h_ref);

/// Extrapolates every column of `reference` to the target height, then applies
/// the month filter and daily maxima. `paired_lower`/`paired_upper` (same
/// timestamps, one column or one per reference column) are required unless a
/// fixed exponent is configured.
WindSeries preprocess_wind(const WindSeries& reference, const WindPreprocessConfig& config,
                           const WindSeries* paired_lower = nullptr,
                           const WindSeries* paired_upper = nullptr);

}  // namespace tailfactor
