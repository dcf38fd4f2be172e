#include <charconv>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>

#include "tailfactor/error.hpp"
#include "tailfactor/model.hpp"

namespace tailfactor {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw InputError("model config line " + std::to_string(line) + ": " + what);
}

double parse_real(std::string_view s, std::size_t line) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    fail(line, "expected a number, got '" + std::string(s) + "'");
  return v;
}

std::uint64_t parse_unsigned(std::string_view s, std::size_t line) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    fail(line, "expected a nonnegative integer, got '" + std::string(s) + "'");
  return v;
}

std::vector<double> parse_list(std::string_view s, std::size_t line) {
  std::vector<double> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(parse_real(s.substr(0, comma), line));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const auto& values) {
  std::string out;
  for (std::size_t i = 0; i < static_cast<std::size_t>(values.size()); ++i) {
    if (i) out += ", ";
    out += real(values[i]);
  }
  return out;
}

// "w : rest" -> (w, rest)
std::pair<double, std::string_view> split_weight(std::string_view value, std::size_t line) {
  const auto colon = value.find(':');
  if (colon == std::string_view::npos) fail(line, "expected 'weight : ...'");
  return {parse_real(value.substr(0, colon), line), trim(value.substr(colon + 1))};
}

FactorSpectralSpec parse_component(std::string_view s, std::size_t k, std::size_t line) {
  if (s == "unit-atoms") return DiscreteUnitAtoms{k};
  if (s.rfind("dirichlet", 0) == 0)
    return SymmetricDirichlet{k, parse_real(s.substr(9), line)};
  fail(line, "mixture components must be 'unit-atoms' or 'dirichlet <concentration>'");
}

}  // namespace

ModelConfig parse_model_config(const std::string& text) {
  std::optional<std::size_t> k;
  std::vector<std::vector<double>> rows;
  std::string spectral;
  std::vector<double> atom_weights;
  std::vector<std::vector<double>> atoms;
  std::optional<double> concentration;
  std::vector<double> mixture_probabilities;
  std::vector<std::pair<std::string, std::size_t>> mixture_components;
  std::uint64_t seed = 0;

  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) fail(line, "expected 'key = value'");
    const auto key = trim(s.substr(0, eq));
    const auto value = trim(s.substr(eq + 1));
    if (key == "K") {
      k = parse_unsigned(value, line);
    } else if (key == "row") {
      rows.push_back(parse_list(value, line));
    } else if (key == "spectral") {
      spectral = std::string(value);
    } else if (key == "atom") {
      auto [w, rest] = split_weight(value, line);
      atom_weights.push_back(w);
      atoms.push_back(parse_list(rest, line));
    } else if (key == "concentration") {
      concentration = parse_real(value, line);
    } else if (key == "component") {
      auto [w, rest] = split_weight(value, line);
      mixture_probabilities.push_back(w);
      mixture_components.emplace_back(std::string(rest), line);
    } else if (key == "seed") {
      seed = parse_unsigned(value, line);
    } else {
      fail(line, "unknown key '" + std::string(key) + "'");
    }
  }

  if (!k || *k == 0) throw InputError("model config: K must be given and positive");
  if (rows.empty()) throw InputError("model config: no loading rows");
  Matrix a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(*k));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].size() != *k)
      throw StructuralError("model config: loading row " + std::to_string(j) + " has " +
                            std::to_string(rows[j].size()) + " entries, expected " +
                            std::to_string(*k));
    for (std::size_t b = 0; b < *k; ++b)
      a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(b)) = rows[j][b];
  }

  auto spec = [&]() -> FactorSpectralSpec {
    if (spectral.empty() || spectral == "unit-atoms") return DiscreteUnitAtoms{*k};
    if (spectral == "dirichlet") {
      if (!concentration) throw InputError("model config: dirichlet needs 'concentration'");
      return SymmetricDirichlet{*k, *concentration};
    }
    if (spectral == "atoms") {
      if (atoms.empty()) throw InputError("model config: 'atoms' needs at least one atom");
      AtomList list;
      list.atoms.resize(static_cast<Eigen::Index>(atoms.size()),
                        static_cast<Eigen::Index>(*k));
      list.weights.resize(static_cast<Eigen::Index>(atoms.size()));
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].size() != *k)
          throw StructuralError("model config: atom " + std::to_string(i) +
                                " has the wrong dimension");
        for (std::size_t b = 0; b < *k; ++b)
          list.atoms(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b)) =
              atoms[i][b];
        list.weights(static_cast<Eigen::Index>(i)) = atom_weights[i];
      }
      return list;
    }
    if (spectral == "mixture") {
      Mixture m;
      m.probabilities = mixture_probabilities;
      for (const auto& [text, at] : mixture_components)
        m.components.push_back(parse_component(text, *k, at));
      return m;
    }
    throw InputError("model config: unknown spectral variant '" + spectral + "'");
  }();
  return ModelConfig{FactorModel(LoadingMatrix(std::move(a)), std::move(spec)), seed};
}

std::string format_model_config(const FactorModel& model, std::uint64_t seed) {
  std::ostringstream out;
  const Matrix& a = model.loading().entries();
  out << "K = " << model.K() << '\n';
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    std::vector<double> row(a.row(j).begin(), a.row(j).end());
    out << "row = " << join(row) << '\n';
  }
  const auto& v = model.spectral().variant();
  if (std::holds_alternative<DiscreteUnitAtoms>(v)) {
    out << "spectral = unit-atoms\n";
  } else if (const auto* d = std::get_if<SymmetricDirichlet>(&v)) {
    out << "spectral = dirichlet\nconcentration = " << real(d->concentration) << '\n';
  } else if (const auto* l = std::get_if<AtomList>(&v)) {
    out << "spectral = atoms\n";
    for (Eigen::Index i = 0; i < l->atoms.rows(); ++i) {
      std::vector<double> atom(l->atoms.row(i).begin(), l->atoms.row(i).end());
      out << "atom = " << real(l->weights(i)) << " : " << join(atom) << '\n';
    }
  } else {
    const auto& m = std::get<Mixture>(v);
    out << "spectral = mixture\n";
    for (std::size_t c = 0; c < m.components.size(); ++c) {
      out << "component = " << real(m.probabilities[c]) << " : ";
      const auto& cv = m.components[c].variant();
      if (std::holds_alternative<DiscreteUnitAtoms>(cv)) {
        out << "unit-atoms\n";
      } else if (const auto* d = std::get_if<SymmetricDirichlet>(&cv)) {
        out << "dirichlet " << real(d->concentration) << '\n';
      } else {
        throw ConfigurationError(
            "mixture components other than unit-atoms and dirichlet cannot be written");
      }
    }
  }
  out << "seed = " << seed << '\n';
  return out.str();
}

}  // namespace tailfactor
