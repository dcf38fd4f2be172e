#pragma once

// CSV ingestion and emission.
//
// Observation files hold one observation per row, comma separated, with an
// optional header row (detected by a non-numeric cell). Empty cells, "NA" and
// "nan" are rejected as missing values.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tailfactor/linalg.hpp"
#include "tailfactor/tpdm.hpp"

namespace tailfactor {

struct CsvTable {
  std::vector<std::string> header;  // empty when the file has none
  Matrix values;
};

/// Parses numeric CSV text. Errors carry the 1-based line number and `source`.
CsvTable parse_csv(const std::string& text, const std::string& source = "<input>");
CsvTable read_csv(const std::string& path);

std::string read_text_file(const std::string& path);

/// Observation table as a DataMatrix.
DataMatrix read_observations(const std::string& path);

/// d nonnegative weights (one column or one row). Sums within 1e-6 of one are
/// renormalized with a warning; anything further off is rejected.
std::vector<double> read_capacity_weights(const std::string& path, std::size_t d,
                                          std::vector<std::string>* warnings = nullptr);
std::vector<double> normalize_capacity_weights(std::vector<double> weights,
                                               std::vector<std::string>* warnings = nullptr);

/// A single value is broadcast to length d.
std::vector<double> read_thresholds(const std::string& path, std::size_t d);
std::vector<double> broadcast_thresholds(const std::vector<double>& values, std::size_t d);

/// Shortest round-trip decimal form of a double.
std::string format_real(double v);

std::string format_csv(const std::vector<std::string>& header, const Matrix& values);

/// Writes atomically enough for our purposes: to `path`, truncating.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace tailfactor
