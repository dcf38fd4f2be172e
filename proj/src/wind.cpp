#include "tailfactor/wind.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string_view>

#include "tailfactor/error.hpp"
#include "tailfactor/io.hpp"

namespace tailfactor {

double hellmann_extrapolate(double v_ref, double alpha, double h, double h_ref) {
  if (!(v_ref > 0.0)) throw InputError("wind speed must be positive");
  if (!(h > 0.0) || !(h_ref > 0.0)) throw InputError("heights must be positive");
  return v_ref * std::pow(h / h_ref, alpha);
}

double hellmann_exponent(double v_ref, double v_h, double h, double h_ref) {
  if (!(v_ref > 0.0) || !(v_h > 0.0)) throw InputError("wind speeds must be positive");
  if (!(h > 0.0) || !(h_ref > 0.0)) throw InputError("heights must be positive");
  if (h == h_ref) throw ParameterError("exponent estimation needs two distinct heights");
  return (std::log(v_h) - std::log(v_ref)) / (std::log(h) - std::log(h_ref));
}

namespace {

int parse_int(std::string_view s, const std::string& text) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw InputError("malformed timestamp '" + text + "'");
  return v;
}

}  // namespace

Timestamp parse_timestamp(const std::string& text) {
  std::string_view s = text;
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  if (s.size() < 10 || s[4] != '-' || s[7] != '-')
    throw InputError("malformed timestamp '" + text + "'");
  Timestamp t;
  t.year = parse_int(s.substr(0, 4), text);
  t.month = parse_int(s.substr(5, 2), text);
  t.day = parse_int(s.substr(8, 2), text);
  if (s.size() > 10) {
    if (s[10] != ' ' && s[10] != 'T') throw InputError("malformed timestamp '" + text + "'");
    auto rest = s.substr(11);
    t.hour = parse_int(rest.substr(0, rest.find(':')), text);
  }
  if (t.month < 1 || t.month > 12 || t.day < 1 || t.day > 31 || t.hour < 0 || t.hour > 23)
    throw InputError("timestamp out of range '" + text + "'");
  return t;
}

std::string format_timestamp(const Timestamp& t, bool with_hour) {
  char buf[32];
  if (with_hour)
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:00", t.year, t.month, t.day, t.hour);
  else
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", t.year, t.month, t.day);
  return buf;
}

WindSeries parse_wind_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  WindSeries out;
  std::string body;
  // Split off the time column and reuse the numeric CSV parser for the rest.
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw InputError(source + ":" + std::to_string(number) + ": expected time and speeds");
    if (out.names.empty() && body.empty()) {
      std::string rest = line.substr(comma + 1);
      std::istringstream cells(rest);
      std::string cell;
      while (std::getline(cells, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        out.names.push_back(cell);
      }
      continue;
    }
    try {
      out.times.push_back(parse_timestamp(line.substr(0, comma)));
    } catch (const InputError& e) {
      throw InputError(source + ":" + std::to_string(number) + ": " + e.what());
    }
    body += line.substr(comma + 1);
    body += '\n';
  }
  if (out.times.empty()) throw InputError(source + ": no data rows");
  const CsvTable table = parse_csv(body, source + " (speed columns)");
  if (!table.header.empty()) throw InputError(source + ": non-numeric wind speed");
  if (static_cast<std::size_t>(table.values.cols()) != out.names.size())
    throw InputError(source + ": header and body widths differ");
  if ((table.values.array() < 0.0).any()) throw InputError(source + ": negative wind speed");
  out.speeds = table.values;
  return out;
}

std::string format_wind_csv(const WindSeries& series, bool with_hour) {
  std::string out = "time";
  for (const auto& n : series.names) out += "," + n;
  out += '\n';
  for (Eigen::Index i = 0; i < series.speeds.rows(); ++i) {
    out += format_timestamp(series.times[static_cast<std::size_t>(i)], with_hour);
    for (Eigen::Index j = 0; j < series.speeds.cols(); ++j) out += "," + format_real(series.speeds(i, j));
    out += '\n';
  }
  return out;
}

ExponentTable hour_month_exponents(const WindSeries& lower, const WindSeries& upper,
                                   double h, double h_ref) {
  if (lower.speeds.rows() != upper.speeds.rows() || lower.speeds.cols() != upper.speeds.cols() ||
      lower.times != upper.times)
    throw InputError("paired wind series differ in shape or timestamps");
  const auto cols = static_cast<std::size_t>(lower.speeds.cols());
  ExponentTable sums(cols), counts(cols);
  for (std::size_t c = 0; c < cols; ++c)
    for (auto& m : sums[c]) m.fill(0.0);
  for (std::size_t c = 0; c < cols; ++c)
    for (auto& m : counts[c]) m.fill(0.0);
  for (Eigen::Index i = 0; i < lower.speeds.rows(); ++i) {
    const Timestamp& t = lower.times[static_cast<std::size_t>(i)];
    for (std::size_t c = 0; c < cols; ++c) {
      const double lo = lower.speeds(i, static_cast<Eigen::Index>(c));
      const double hi = upper.speeds(i, static_cast<Eigen::Index>(c));
      if (!(lo > 0.0) || !(hi > 0.0)) continue;  // calm hours carry no exponent
      sums[c][t.month - 1][t.hour] += hellmann_exponent(lo, hi, h, h_ref);
      counts[c][t.month - 1][t.hour] += 1.0;
    }
  }
  for (std::size_t c = 0; c < cols; ++c)
    for (int m = 0; m < 12; ++m)
      for (int hr = 0; hr < 24; ++hr)
        sums[c][m][hr] = counts[c][m][hr] > 0.0 ? sums[c][m][hr] / counts[c][m][hr]
                                                : std::numeric_limits<double>::quiet_NaN();
  return sums;
}

WindSeries preprocess_wind(const WindSeries& reference, const WindPreprocessConfig& config,
                           const WindSeries* paired_lower, const WindSeries* paired_upper) {
  if (!(config.reference_height > 0.0) || !(config.target_height > 0.0))
    throw InputError("heights must be positive");
  if (config.target_height == config.reference_height)
    throw ParameterError("target height equals the reference height");
  const auto cols = reference.speeds.cols();

  ExponentTable table;
  if (!config.fixed_exponent) {
    if (!paired_lower || !paired_upper)
      throw ConfigurationError("exponent estimation needs paired lower and upper wind series");
    const auto pc = paired_lower->speeds.cols();
    if (pc != 1 && pc != cols)
      throw InputError("paired series must have one column or one per reference column");
    if (config.group_hour_month) {
      table = hour_month_exponents(*paired_lower, *paired_upper, config.paired_height,
                                   config.reference_height);
    } else if (paired_lower->times != reference.times ||
               paired_upper->times != reference.times) {
      throw InputError("ungrouped exponents need paired series with the reference timestamps");
    }
  }

  WindSeries out;
  out.names = reference.names;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < reference.times.size(); ++i) {
    const int month = reference.times[i].month;
    if (config.months.empty() ||
        std::find(config.months.begin(), config.months.end(), month) != config.months.end())
      kept.push_back(i);
  }
  Matrix hub(static_cast<Eigen::Index>(kept.size()), cols);
  for (std::size_t r = 0; r < kept.size(); ++r) {
    const std::size_t i = kept[r];
    const Timestamp& t = reference.times[i];
    for (Eigen::Index c = 0; c < cols; ++c) {
      double alpha = 0.0;
      if (config.fixed_exponent) {
        alpha = *config.fixed_exponent;
      } else {
        const auto pc = paired_lower->speeds.cols() == 1 ? Eigen::Index{0} : c;
        if (config.group_hour_month) {
          alpha = table[static_cast<std::size_t>(pc)][t.month - 1][t.hour];
          if (std::isnan(alpha))
            throw InputError("no paired data for month " + std::to_string(t.month) +
                             ", hour " + std::to_string(t.hour));
        } else {
          alpha = hellmann_exponent(paired_lower->speeds(static_cast<Eigen::Index>(i), pc),
                                    paired_upper->speeds(static_cast<Eigen::Index>(i), pc),
                                    config.paired_height, config.reference_height);
        }
      }
      const double v = reference.speeds(static_cast<Eigen::Index>(i), c);
      hub(static_cast<Eigen::Index>(r), c) =
          v > 0.0 ? hellmann_extrapolate(v, alpha, config.target_height,
                                         config.reference_height)
                  : 0.0;
    }
    out.times.push_back(t);
  }

  if (!config.daily_maxima) {
    out.speeds = std::move(hub);
    return out;
  }
  std::vector<Timestamp> days;
  std::vector<Eigen::Index> first_row;
  for (std::size_t r = 0; r < out.times.size(); ++r) {
    Timestamp day = out.times[r];
    day.hour = 0;
    if (days.empty() || !(days.back() == day)) {
      days.push_back(day);
      first_row.push_back(static_cast<Eigen::Index>(r));
    }
  }
  Matrix daily(static_cast<Eigen::Index>(days.size()), cols);
  for (std::size_t g = 0; g < days.size(); ++g) {
    const Eigen::Index begin = first_row[g];
    const Eigen::Index end =
        g + 1 < days.size() ? first_row[g + 1] : static_cast<Eigen::Index>(out.times.size());
    daily.row(static_cast<Eigen::Index>(g)) = hub.middleRows(begin, end - begin).colwise().maxCoeff();
  }
  out.times = std::move(days);
  out.speeds = std::move(daily);
  return out;
}

}  // namespace tailfactor
