#include "tailfactor/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "tailfactor/error.hpp"

namespace tailfactor {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  while (true) {
    const auto comma = line.find(',');
    cells.push_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return cells;
}

bool is_missing(std::string_view cell) {
  if (cell.empty()) return true;
  std::string lower(cell);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return lower == "na" || lower == "nan" || lower == "null";
}

std::optional<double> to_number(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) return std::nullopt;
  return v;
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw InputError(source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

CsvTable parse_csv(const std::string& text, const std::string& source) {
  CsvTable table;
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t rows = 0;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  bool first = true;
  while (std::getline(in, raw)) {
    ++line;
    if (trim(raw).empty()) continue;
    const auto cells = split(raw);
    if (first) {
      first = false;
      width = cells.size();
      bool header = false;
      for (auto c : cells)
        if (!is_missing(c) && !to_number(c)) header = true;
      if (header) {
        for (auto c : cells) table.header.emplace_back(c);
        continue;
      }
    }
    if (cells.size() != width)
      fail(source, line, "expected " + std::to_string(width) + " fields, found " +
                             std::to_string(cells.size()));
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (is_missing(cells[j]))
        fail(source, line, "missing value in column " + std::to_string(j + 1));
      const auto v = to_number(cells[j]);
      if (!v)
        fail(source, line, "non-numeric value '" + std::string(cells[j]) + "' in column " +
                               std::to_string(j + 1));
      if (!std::isfinite(*v))
        fail(source, line, "non-finite value in column " + std::to_string(j + 1));
      values.push_back(*v);
    }
    ++rows;
  }
  if (rows == 0) throw InputError(source + ": no data rows");
  table.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(width));
  std::copy(values.begin(), values.end(), table.values.data());
  return table;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CsvTable read_csv(const std::string& path) { return parse_csv(read_text_file(path), path); }

DataMatrix read_observations(const std::string& path) {
  return DataMatrix(read_csv(path).values);
}

std::vector<double> normalize_capacity_weights(std::vector<double> weights,
                                               std::vector<std::string>* warnings) {
  if (weights.empty()) throw InputError("capacity weights are empty");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0)
      throw InputError("capacity weights must be finite and nonnegative");
    total += w;
  }
  const double off = std::abs(total - 1.0);
  if (off > 1e-6)
    throw InputError("capacity weights sum to " + format_real(total) + ", not 1");
  if (off > 0.0) {
    for (double& w : weights) w /= total;
    if (warnings)
      warnings->push_back("capacity weights summed to " + format_real(total) +
                          "; renormalized");
  }
  return weights;
}

std::vector<double> read_capacity_weights(const std::string& path, std::size_t d,
                                          std::vector<std::string>* warnings) {
  const CsvTable t = read_csv(path);
  if (t.values.rows() != 1 && t.values.cols() != 1)
    throw InputError(path + ": capacity weights must form one row or one column");
  std::vector<double> w(t.values.data(), t.values.data() + t.values.size());
  if (w.size() != d)
    throw InputError(path + ": expected " + std::to_string(d) + " capacity weights, found " +
                     std::to_string(w.size()));
  return normalize_capacity_weights(std::move(w), warnings);
}

std::vector<double> broadcast_thresholds(const std::vector<double>& values, std::size_t d) {
  if (values.size() == 1) return std::vector<double>(d, values.front());
  if (values.size() != d)
    throw InputError("expected 1 or " + std::to_string(d) + " thresholds, found " +
                     std::to_string(values.size()));
  return values;
}

std::vector<double> read_thresholds(const std::string& path, std::size_t d) {
  const CsvTable t = read_csv(path);
  if (t.values.rows() != 1 && t.values.cols() != 1)
    throw InputError(path + ": thresholds must form one row or one column");
  return broadcast_thresholds({t.values.data(), t.values.data() + t.values.size()}, d);
}

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_csv(const std::vector<std::string>& header, const Matrix& values) {
  std::string out;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out += ',';
    out += header[j];
  }
  if (!header.empty()) out += '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (j) out += ',';
      out += format_real(values(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path + "'");
}

}  // namespace tailfactor
