#include "tailfactor/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <string>

#include <json.hpp>

#include "tailfactor/error.hpp"
#include "tailfactor/io.hpp"
#include "tailfactor/model.hpp"
#include "tailfactor/rng.hpp"
#include "tailfactor/simd/kernels.hpp"
#include "tailfactor/wind.hpp"

namespace tailfactor {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Option (de)serialization for manifests.

namespace {

template <class T>
json optional_to_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> optional_from_json(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

template <class T>
T value_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

json to_json(const SimulateOptions& o) {
  return {{"model", o.model}, {"n", o.n}, {"seed", optional_to_json(o.seed)}};
}

json to_json(const TpdmOptions& o) {
  return {{"data", o.data},
          {"k", optional_to_json(o.k)},
          {"k_prime", optional_to_json(o.k_prime)},
          {"norm", o.norm},
          {"lower_tail", o.lower_tail}};
}

json to_json(const FitOptions& o) {
  return {{"data", o.data},
          {"k", optional_to_json(o.k)},
          {"k_prime", optional_to_json(o.k_prime)},
          {"k_margin", optional_to_json(o.k_margin)},
          {"norm", o.norm},
          {"kappa_grid", o.kappa_grid},
          {"lambda_grid", o.lambda_grid},
          {"projection", o.projection},
          {"lower_tail", o.lower_tail},
          {"fista_max_iter", o.fista_max_iter},
          {"fista_tol", o.fista_tol},
          {"post_lasso", o.post_lasso}};
}

json to_json(const RiskOptions& o) {
  return {{"fit", to_json(o.fit)},
          {"model", o.model},
          {"alphas", o.alphas},
          {"thresholds", o.thresholds},
          {"thresholds_file", o.thresholds_file},
          {"weights", o.weights}};
}

json to_json(const BootstrapOptions& o) {
  return {{"risk", to_json(o.risk)},
          {"estimator", o.estimator},
          {"replicates", o.replicates},
          {"beta", o.beta},
          {"seed", o.seed}};
}

json to_json(const WindOptions& o) {
  return {{"input", o.input},
          {"paired_lower", o.paired_lower},
          {"paired_upper", o.paired_upper},
          {"exponent", optional_to_json(o.exponent)},
          {"reference_height", o.reference_height},
          {"target_height", o.target_height},
          {"paired_height", o.paired_height},
          {"group_hour_month", o.group_hour_month},
          {"daily_maxima", o.daily_maxima},
          {"months", o.months}};
}

SimulateOptions simulate_from_json(const json& j) {
  SimulateOptions o;
  o.model = j.at("model").get<std::string>();
  o.n = j.at("n").get<std::size_t>();
  o.seed = optional_from_json<std::uint64_t>(j, "seed");
  return o;
}

TpdmOptions tpdm_from_json(const json& j) {
  TpdmOptions o;
  o.data = j.at("data").get<std::string>();
  o.k = optional_from_json<std::size_t>(j, "k");
  o.k_prime = optional_from_json<std::size_t>(j, "k_prime");
  o.norm = value_or<std::string>(j, "norm", o.norm);
  o.lower_tail = value_or(j, "lower_tail", o.lower_tail);
  return o;
}

FitOptions fit_from_json(const json& j) {
  FitOptions o;
  o.data = j.at("data").get<std::string>();
  o.k = optional_from_json<std::size_t>(j, "k");
  o.k_prime = optional_from_json<std::size_t>(j, "k_prime");
  o.k_margin = optional_from_json<std::size_t>(j, "k_margin");
  o.norm = value_or<std::string>(j, "norm", o.norm);
  o.kappa_grid = value_or(j, "kappa_grid", o.kappa_grid);
  o.lambda_grid = value_or(j, "lambda_grid", o.lambda_grid);
  o.projection = value_or<std::string>(j, "projection", o.projection);
  o.lower_tail = value_or(j, "lower_tail", o.lower_tail);
  o.fista_max_iter = value_or(j, "fista_max_iter", o.fista_max_iter);
  o.fista_tol = value_or(j, "fista_tol", o.fista_tol);
  o.post_lasso = value_or(j, "post_lasso", o.post_lasso);
  return o;
}

RiskOptions risk_from_json(const json& j) {
  RiskOptions o;
  o.fit = fit_from_json(j.at("fit"));
  o.model = value_or<std::string>(j, "model", o.model);
  o.alphas = value_or(j, "alphas", o.alphas);
  o.thresholds = value_or(j, "thresholds", o.thresholds);
  o.thresholds_file = value_or<std::string>(j, "thresholds_file", o.thresholds_file);
  o.weights = value_or<std::string>(j, "weights", o.weights);
  return o;
}

BootstrapOptions bootstrap_from_json(const json& j) {
  BootstrapOptions o;
  o.risk = risk_from_json(j.at("risk"));
  o.estimator = value_or<std::string>(j, "estimator", o.estimator);
  o.replicates = value_or(j, "replicates", o.replicates);
  o.beta = value_or(j, "beta", o.beta);
  o.seed = value_or(j, "seed", o.seed);
  return o;
}

WindOptions wind_from_json(const json& j) {
  WindOptions o;
  o.input = j.at("input").get<std::string>();
  o.paired_lower = value_or<std::string>(j, "paired_lower", o.paired_lower);
  o.paired_upper = value_or<std::string>(j, "paired_upper", o.paired_upper);
  o.exponent = optional_from_json<double>(j, "exponent");
  o.reference_height = value_or(j, "reference_height", o.reference_height);
  o.target_height = value_or(j, "target_height", o.target_height);
  o.paired_height = value_or(j, "paired_height", o.paired_height);
  o.group_hour_month = value_or(j, "group_hour_month", o.group_hour_month);
  o.daily_maxima = value_or(j, "daily_maxima", o.daily_maxima);
  o.months = value_or(j, "months", o.months);
  return o;
}

Command command_from_json(const std::string& name, const json& options) {
  if (name == "simulate") return simulate_from_json(options);
  if (name == "tpdm") return tpdm_from_json(options);
  if (name == "fit") return fit_from_json(options);
  if (name == "risk") return risk_from_json(options);
  if (name == "bootstrap") return bootstrap_from_json(options);
  if (name == "preprocess-wind") return wind_from_json(options);
  throw ConfigurationError("manifest names unknown command '" + name + "'");
}

// Paths are stored absolute so that a manifest replays from any directory.
std::string absolute(const std::string& path) {
  return path.empty() ? path : fs::absolute(path).lexically_normal().string();
}

void absolutize(FitOptions& o) { o.data = absolute(o.data); }
void absolutize(RiskOptions& o) {
  absolutize(o.fit);
  o.model = absolute(o.model);
  o.thresholds_file = absolute(o.thresholds_file);
  o.weights = absolute(o.weights);
}

// ---------------------------------------------------------------------------
// Output handling.

class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : dir_(dir) {
    if (dir_.empty()) throw ConfigurationError("no output directory given");
    if (!fs::exists(dir_)) {
      fs::create_directories(dir_);
      created_ = true;
    } else if (!fs::is_directory(dir_)) {
      throw ConfigurationError("'" + dir + "' exists and is not a directory");
    }
  }

  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;

  ~OutputDir() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& name : files_) fs::remove(dir_ / name, ec);
    if (created_) fs::remove(dir_, ec);  // only succeeds when empty
  }

  void write(const std::string& name, const std::string& text) {
    files_.push_back(name);
    write_text_file((dir_ / name).string(), text);
  }

  void commit() { committed_ = true; }
  const std::vector<std::string>& files() const { return files_; }
  std::string path() const { return dir_.string(); }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
  bool created_ = false;
  bool committed_ = false;
};

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw_error(e.kind(), std::string(name) + ": " + e.what());
  } catch (const json::exception& e) {
    throw InputError(std::string(name) + ": " + e.what());
  } catch (const fs::filesystem_error& e) {
    throw InputError(std::string(name) + ": " + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json matrix_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Matrix matrix_from_json(const json& j, Eigen::Index cols) {
  Matrix m(static_cast<Eigen::Index>(j.size()), cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw InputError("matrix row " + std::to_string(i) + " has the wrong length");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

std::vector<std::string> column_names(const char* prefix, std::size_t count) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < count; ++j) names.push_back(prefix + std::to_string(j + 1));
  return names;
}

// Observations after the optional reciprocal transform.
DataMatrix load_data(const std::string& path, bool lower_tail) {
  DataMatrix data = read_observations(path);
  return lower_tail ? lower_tail_transform(data) : data;
}

}  // namespace

std::string command_name(const Command& command) {
  return std::visit(
      [](const auto& o) -> std::string {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, SimulateOptions>) return "simulate";
        if constexpr (std::is_same_v<T, TpdmOptions>) return "tpdm";
        if constexpr (std::is_same_v<T, FitOptions>) return "fit";
        if constexpr (std::is_same_v<T, RiskOptions>) return "risk";
        if constexpr (std::is_same_v<T, BootstrapOptions>) return "bootstrap";
        return "preprocess-wind";
      },
      command);
}

// ---------------------------------------------------------------------------
// Library-level pipeline pieces.

std::size_t default_threshold_count(std::size_t n) {
  if (n <= kGpdMinExcesses + 1)
    throw ParameterError("sample too small for default thresholds (n = " + std::to_string(n) + ")");
  const auto k = static_cast<std::size_t>(std::llround(0.05 * static_cast<double>(n)));
  return std::clamp<std::size_t>(k, kGpdMinExcesses, n - 1);
}

SelectionSettings resolve_selection(const FitOptions& options, std::size_t n) {
  SelectionSettings s;
  s.k = options.k.value_or(default_threshold_count(n));
  s.k_prime = options.k_prime.value_or(s.k);
  s.norm = Norm::parse(options.norm);
  s.kappa_grid = options.kappa_grid.empty() ? kappa_grid_default() : options.kappa_grid;
  s.lambda_grid = options.lambda_grid.empty() ? lambda_grid_default() : options.lambda_grid;
  if (options.projection == "both")
    s.projection = {false, true};
  else if (options.projection == "on")
    s.projection = {true};
  else if (options.projection == "off")
    s.projection = {false};
  else
    throw ParameterError("projection must be one of both, on, off");
  s.lsp.fista_max_iter = options.fista_max_iter;
  s.lsp.fista_tol = options.fista_tol;
  s.lsp.post_lasso = options.post_lasso;
  return s;
}

std::vector<MarginModel> fit_margins(const DataMatrix& data, std::size_t k_margin,
                                     std::vector<std::string>* warnings) {
  std::vector<MarginModel> out;
  out.reserve(data.d());
  for (std::size_t j = 0; j < data.d(); ++j) {
    std::vector<double> column = data.column(j);
    FitMarginResult r = fit_margin(column, k_margin);
    if (warnings && r.dropped_ties > 0)
      warnings->push_back("column " + std::to_string(j + 1) + ": dropped " +
                          std::to_string(r.dropped_ties) + " tied excesses at the threshold");
    if (warnings && !r.fit.converged)
      warnings->push_back("column " + std::to_string(j + 1) +
                          ": GPD fit stopped at the edge of the search region");
    out.push_back(MarginModel{r.fit, Ecdf(std::move(column)), r.dropped_ties});
  }
  return out;
}

FittedTailModel fit_tail_model(const DataMatrix& data, const SelectionSettings& settings,
                               std::size_t k_margin, SelectionResult* selection,
                               std::vector<std::string>* warnings) {
  SelectionResult result = select_hyperparameters(data, settings);
  FittedTailModel model = result.model;
  model.margins = fit_margins(data, k_margin, warnings);
  if (warnings && !model.adequate)
    warnings->push_back("selected model has R^2 = " + format_real(model.r_squared) +
                        ", not above " + format_real(kAdequateRSquared));
  if (selection) *selection = std::move(result);
  return model;
}

std::string fitted_model_to_json(const FittedTailModel& model, bool lower_tail) {
  json margins = json::array();
  for (const auto& m : model.margins)
    margins.push_back({{"threshold", m.fit.threshold},
                       {"xi", m.fit.xi},
                       {"sigma", m.fit.sigma},
                       {"k", m.fit.k},
                       {"n", m.fit.n},
                       {"excess_count", m.fit.excess_count},
                       {"converged", m.fit.converged},
                       {"dropped_ties", m.dropped_ties}});
  json weights = json::array();
  for (Eigen::Index i = 0; i < model.psi_hat.weights.size(); ++i)
    weights.push_back(model.psi_hat.weights(i));
  const json j = {
      {"format", "tailfactor-fitted-model"},
      {"d", model.d()},
      {"n", model.margins.empty() ? 0 : model.margins.front().fit.n},
      {"K_hat", model.K_hat},
      {"k", model.k},
      {"k_prime", model.k_prime},
      {"norm", model.norm.name()},
      {"lower_tail", lower_tail},
      {"config",
       {{"kappa", model.config.kappa},
        {"lambda", model.config.lambda},
        {"projection", model.config.projection}}},
      {"r_squared", model.r_squared},
      {"adequate", model.adequate},
      {"partition", model.purevar.partition},
      {"loading", matrix_json(model.loading.matrix)},
      {"psi",
       {{"atoms", matrix_json(model.psi_hat.atoms)},
        {"weights", weights},
        {"k_prime", model.psi_hat.k_prime},
        {"effective_count", model.psi_hat.effective_count}}},
      {"margins", margins}};
  return dump(j);
}

FittedTailModel fitted_model_from_json(const std::string& text, const DataMatrix& data,
                                       bool* lower_tail) {
  const json j = json::parse(text);
  if (j.value("format", "") != "tailfactor-fitted-model")
    throw InputError("not a fitted model file");
  FittedTailModel m;
  const auto d = j.at("d").get<std::size_t>();
  if (d != data.d())
    throw StructuralError("model has " + std::to_string(d) + " coordinates, data has " +
                          std::to_string(data.d()));
  if (j.at("n").get<std::size_t>() != data.n())
    throw StructuralError("model was fitted on a different number of observations");
  m.K_hat = j.at("K_hat").get<std::size_t>();
  m.k = j.at("k").get<std::size_t>();
  m.k_prime = j.at("k_prime").get<std::size_t>();
  m.norm = Norm::parse(j.at("norm").get<std::string>());
  if (lower_tail) *lower_tail = j.at("lower_tail").get<bool>();
  m.config.kappa = j.at("config").at("kappa").get<double>();
  m.config.lambda = j.at("config").at("lambda").get<double>();
  m.config.projection = j.at("config").at("projection").get<bool>();
  m.r_squared = j.at("r_squared").get<double>();
  m.adequate = j.at("adequate").get<bool>();
  m.purevar.partition = j.at("partition").get<std::vector<std::vector<std::size_t>>>();
  m.purevar.K_hat = m.purevar.partition.size();
  m.purevar.kappa = m.config.kappa;
  for (const auto& s : m.purevar.partition) m.purevar.pure.insert(m.purevar.pure.end(), s.begin(), s.end());
  std::sort(m.purevar.pure.begin(), m.purevar.pure.end());
  const auto k = static_cast<Eigen::Index>(m.K_hat);
  m.loading.matrix = matrix_from_json(j.at("loading"), k);
  if (static_cast<std::size_t>(m.loading.matrix.rows()) != d)
    throw StructuralError("loading matrix has the wrong number of rows");
  m.loading.config.lambda = m.config.lambda;
  m.loading.config.use_projection = m.config.projection;
  const json& psi = j.at("psi");
  m.psi_hat.atoms = matrix_from_json(psi.at("atoms"), k);
  const auto w = psi.at("weights").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(w.size()) != m.psi_hat.atoms.rows())
    throw StructuralError("spectral atoms and weights differ in count");
  m.psi_hat.weights = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
  m.psi_hat.k_prime = psi.at("k_prime").get<std::size_t>();
  m.psi_hat.effective_count = psi.at("effective_count").get<std::size_t>();
  const json& margins = j.at("margins");
  if (margins.size() != d) throw StructuralError("margin count differs from d");
  for (std::size_t c = 0; c < d; ++c) {
    const json& g = margins.at(c);
    GpdFit fit;
    fit.threshold = g.at("threshold").get<double>();
    fit.xi = g.at("xi").get<double>();
    fit.sigma = g.at("sigma").get<double>();
    fit.k = g.at("k").get<std::size_t>();
    fit.n = g.at("n").get<std::size_t>();
    fit.excess_count = g.at("excess_count").get<std::size_t>();
    fit.converged = g.at("converged").get<bool>();
    m.margins.push_back(MarginModel{fit, Ecdf(data.column(c)), g.at("dropped_ties").get<std::size_t>()});
  }
  return m;
}

// ---------------------------------------------------------------------------
// Commands.

namespace {

using Warnings = std::vector<std::string>;

void run_simulate(const SimulateOptions& o, OutputDir& out, Warnings&) {
  const ModelConfig cfg =
      stage("model", [&] { return parse_model_config(read_text_file(o.model)); });
  const std::uint64_t seed = o.seed.value_or(cfg.seed);
  stage("validate", [&] {
    const ValidationReport report = validate_model(cfg.model);
    if (!report.ok()) {
      std::string msg = "invalid model:";
      for (const auto& v : report.violations) msg += " [" + v + "]";
      throw InputError(msg);
    }
  });
  const SyntheticSample sample = stage("simulate", [&] { return simulate(cfg.model, o.n, seed); });
  out.write("sample.csv", format_csv(column_names("y", cfg.model.d()), sample.data));

  const OracleOptions oracle{std::size_t{100000}, derive_seed(seed, 1)};
  const TpdmOracle t = stage("oracle", [&] { return tpdm_oracle(cfg.model, Norm::max(), oracle); });
  const json truth = {{"K", cfg.model.K()},
                      {"d", cfg.model.d()},
                      {"n", o.n},
                      {"seed", seed},
                      {"model_config", format_model_config(cfg.model, seed)},
                      {"loading", matrix_json(cfg.model.loading().entries())},
                      {"tpdm_max_norm", matrix_json(t.sigma.matrix)},
                      {"latent_max_norm", matrix_json(t.latent)}};
  out.write("truth.json", dump(truth));
}

void run_tpdm(const TpdmOptions& o, OutputDir& out, Warnings& warnings) {
  const DataMatrix data = stage("ingest", [&] { return load_data(o.data, o.lower_tail); });
  const std::size_t k = o.k.value_or(default_threshold_count(data.n()));
  const std::size_t k_prime = o.k_prime.value_or(k);
  const PseudoObservations pseudo = stage("ranks", [&] { return pseudo_pareto(data); });
  for (std::size_t j : pseudo.tied_columns)
    warnings.push_back("column " + std::to_string(j + 1) + " has ties; ranks use row order");
  const Tpdm tpdm = stage("tpdm", [&] { return empirical_tpdm(pseudo, k, Norm::parse(o.norm)); });
  const Matrix chi = stage("chi", [&] { return empirical_chi(pseudo.ranks, k_prime); });
  const auto names = column_names("x", data.d());
  out.write("tpdm.csv", format_csv(names, tpdm.matrix));
  out.write("chi.csv", format_csv(names, chi));
  std::vector<std::size_t> tied;
  for (std::size_t j : pseudo.tied_columns) tied.push_back(j + 1);
  out.write("tpdm.json", dump({{"n", data.n()},
                               {"d", data.d()},
                               {"k", k},
                               {"k_prime", k_prime},
                               {"norm", tpdm.norm.name()},
                               {"effective_count", tpdm.effective_count},
                               {"tied_columns", tied}}));
}

struct FitArtifacts {
  FittedTailModel model;
  SelectionResult selection;
  SelectionSettings settings;
  std::size_t k_margin = 0;
};

FitArtifacts fit_from_options(const FitOptions& o, const DataMatrix& data, Warnings& warnings) {
  FitArtifacts a;
  a.settings = stage("settings", [&] { return resolve_selection(o, data.n()); });
  a.k_margin = o.k_margin.value_or(a.settings.k);
  a.model = stage("fit", [&] {
    return fit_tail_model(data, a.settings, a.k_margin, &a.selection, &warnings);
  });
  return a;
}

void write_fit_reports(const FitArtifacts& a, const DataMatrix& data, bool lower_tail,
                       OutputDir& out) {
  const FittedTailModel& m = a.model;
  out.write("model.json", fitted_model_to_json(m, lower_tail));
  out.write("loading.csv", format_csv(column_names("factor", m.K_hat), m.loading.matrix));

  Matrix psi(m.psi_hat.atoms.rows(), m.psi_hat.atoms.cols() + 1);
  psi << m.psi_hat.atoms, m.psi_hat.weights;
  auto psi_names = column_names("z", m.K_hat);
  psi_names.emplace_back("weight");
  out.write("psi.csv", format_csv(psi_names, psi));

  std::string margins = "index,threshold,xi,sigma,k,converged\n";
  for (std::size_t j = 0; j < m.margins.size(); ++j) {
    const GpdFit& f = m.margins[j].fit;
    margins += std::to_string(j + 1) + "," + format_real(f.threshold) + "," + format_real(f.xi) +
               "," + format_real(f.sigma) + "," + std::to_string(f.k) + "," +
               (f.converged ? "true" : "false") + "\n";
  }
  out.write("margins.csv", margins);

  std::string table = "kappa,lambda,projection,K_hat,r_squared\n";
  for (const auto& row : a.selection.table)
    table += format_real(row.choice.kappa) + "," + format_real(row.choice.lambda) + "," +
             (row.choice.projection ? "true" : "false") + "," + std::to_string(row.K_hat) + "," +
             (row.r_squared ? format_real(*row.r_squared) : "NA") + "\n";
  out.write("selection.csv", table);

  const Matrix chi_model = model_chi(m.loading.matrix, m.psi_hat);
  const Matrix chi_emp = empirical_chi(data, m.k_prime);
  std::string pairs = "j,l,chi_model,chi_empirical\n";
  for (Eigen::Index j = 0; j < chi_emp.rows(); ++j)
    for (Eigen::Index l = j + 1; l < chi_emp.cols(); ++l)
      pairs += std::to_string(j + 1) + "," + std::to_string(l + 1) + "," +
               format_real(chi_model(j, l)) + "," + format_real(chi_emp(j, l)) + "\n";
  out.write("chi_pairs.csv", pairs);

  json partition = json::array();
  for (const auto& s : m.purevar.partition) partition.push_back(s);
  out.write("purevar.json", dump({{"K_hat", m.K_hat},
                                  {"partition", partition},
                                  {"kappa", m.config.kappa},
                                  {"index_base", 0}}));
}

void run_fit(const FitOptions& o, OutputDir& out, Warnings& warnings) {
  const DataMatrix data = stage("ingest", [&] { return load_data(o.data, o.lower_tail); });
  const FitArtifacts a = fit_from_options(o, data, warnings);
  write_fit_reports(a, data, o.lower_tail, out);
  const FittedTailModel& m = a.model;
  out.write("report.json", dump({{"n", data.n()},
                                 {"d", data.d()},
                                 {"K_hat", m.K_hat},
                                 {"kappa", m.config.kappa},
                                 {"lambda", m.config.lambda},
                                 {"projection", m.config.projection},
                                 {"r_squared", m.r_squared},
                                 {"adequate", m.adequate},
                                 {"k", m.k},
                                 {"k_prime", m.k_prime},
                                 {"k_margin", a.k_margin},
                                 {"norm", m.norm.name()},
                                 {"warnings", warnings}}));
}

struct RiskGrid {
  std::vector<double> alphas;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> x;  // thresholds on the modelling scale
  std::vector<double> weights;
};

RiskGrid resolve_grid(const RiskOptions& o, std::size_t d, bool lower_tail, Warnings& warnings) {
  RiskGrid g;
  g.alphas = o.alphas;
  if (g.alphas.empty()) throw ConfigurationError("no alpha values given");
  for (double a : g.alphas)
    if (!(a > 0.0) || a > 1.0) throw ParameterError("alpha values must lie in (0, 1]");
  std::vector<std::vector<double>> original;
  for (double w : o.thresholds) {
    original.push_back(std::vector<double>(d, w));
    g.labels.push_back(format_real(w));
  }
  if (!o.thresholds_file.empty()) {
    original.push_back(read_thresholds(o.thresholds_file, d));
    g.labels.emplace_back("file");
  }
  if (original.empty()) throw ConfigurationError("no thresholds given");
  for (auto& w : original) g.x.push_back(lower_tail ? lower_tail_thresholds(w) : w);
  g.weights = o.weights.empty()
                  ? std::vector<double>(d, 1.0 / static_cast<double>(d))
                  : read_capacity_weights(o.weights, d, &warnings);
  return g;
}

void run_risk(const RiskOptions& o, OutputDir& out, Warnings& warnings) {
  bool lower_tail = o.fit.lower_tail;
  FittedTailModel model;
  std::optional<DataMatrix> data;
  if (!o.model.empty()) {
    const std::string text = stage("model", [&] { return read_text_file(o.model); });
    lower_tail = stage("model", [&] { return json::parse(text).at("lower_tail").get<bool>(); });
    data.emplace(stage("ingest", [&] { return load_data(o.fit.data, lower_tail); }));
    model = stage("model", [&] { return fitted_model_from_json(text, *data); });
  } else {
    data.emplace(stage("ingest", [&] { return load_data(o.fit.data, lower_tail); }));
    FitArtifacts a = fit_from_options(o.fit, *data, warnings);
    out.write("model.json", fitted_model_to_json(a.model, lower_tail));
    model = std::move(a.model);
  }
  const RiskGrid g = stage("grid", [&] { return resolve_grid(o, data->d(), lower_tail, warnings); });
  std::string csv = "alpha,threshold,p_model,p_empirical,clipped\n";
  stage("risk", [&] {
    for (std::size_t t = 0; t < g.x.size(); ++t) {
      for (double alpha : g.alphas) {
        const SubsetFamily family = SubsetFamily::capacity(g.weights, alpha);
        const ProbabilityEstimate p = estimate_p(model, g.x[t], family);
        const double emp = empirical_p(*data, g.x[t], family);
        csv += format_real(alpha) + "," + g.labels[t] + "," + format_real(p.p) + "," +
               format_real(emp) + "," + (p.clipped ? "true" : "false") + "\n";
      }
    }
  });
  out.write("risk.csv", csv);
}

void run_bootstrap(const BootstrapOptions& o, OutputDir& out, Warnings& warnings) {
  if (!o.risk.model.empty())
    throw ConfigurationError("bootstrap refits on every replicate; do not pass a fitted model");
  const bool lower_tail = o.risk.fit.lower_tail;
  const DataMatrix data = stage("ingest", [&] { return load_data(o.risk.fit.data, lower_tail); });
  const RiskGrid g = stage("grid", [&] { return resolve_grid(o.risk, data.d(), lower_tail, warnings); });
  std::vector<SubsetFamily> families;
  for (double alpha : g.alphas) families.push_back(SubsetFamily::capacity(g.weights, alpha));

  VectorEstimator estimator;
  if (o.estimator == "empirical") {
    estimator = [&](const DataMatrix& x) {
      std::vector<double> p;
      for (const auto& thresholds : g.x)
        for (const auto& family : families) p.push_back(empirical_p(x, thresholds, family));
      return p;
    };
  } else if (o.estimator == "model") {
    const SelectionSettings settings = resolve_selection(o.risk.fit, data.n());
    const std::size_t k_margin = o.risk.fit.k_margin.value_or(settings.k);
    estimator = [&, settings, k_margin](const DataMatrix& x) {
      const FittedTailModel m = fit_tail_model(x, settings, k_margin);
      std::vector<double> p;
      for (const auto& thresholds : g.x)
        for (const auto& family : families) p.push_back(estimate_p(m, thresholds, family).p);
      return p;
    };
  } else {
    throw ParameterError("estimator must be 'empirical' or 'model'");
  }
  const std::vector<BootstrapCi> cis = stage("bootstrap", [&] {
    return bootstrap_ci_vector(data, estimator, o.replicates, o.beta, o.seed);
  });
  if (!cis.empty() && cis.front().failed > 0)
    warnings.push_back(std::to_string(cis.front().failed) + " bootstrap replicates failed");
  std::string csv = "alpha,threshold,point,lower,upper,level,replicates,failed\n";
  std::size_t i = 0;
  for (std::size_t t = 0; t < g.x.size(); ++t)
    for (double alpha : g.alphas) {
      const BootstrapCi& ci = cis[i++];
      csv += format_real(alpha) + "," + g.labels[t] + "," + format_real(ci.point) + "," +
             format_real(ci.lower) + "," + format_real(ci.upper) + "," + format_real(ci.level) +
             "," + std::to_string(ci.replicates) + "," + std::to_string(ci.failed) + "\n";
    }
  out.write("bootstrap.csv", csv);
}

void run_wind(const WindOptions& o, OutputDir& out, Warnings&) {
  const WindSeries reference =
      stage("ingest", [&] { return parse_wind_csv(read_text_file(o.input), o.input); });
  std::optional<WindSeries> lower, upper;
  if (!o.paired_lower.empty())
    lower = stage("ingest", [&] { return parse_wind_csv(read_text_file(o.paired_lower), o.paired_lower); });
  if (!o.paired_upper.empty())
    upper = stage("ingest", [&] { return parse_wind_csv(read_text_file(o.paired_upper), o.paired_upper); });
  WindPreprocessConfig config;
  config.reference_height = o.reference_height;
  config.target_height = o.target_height;
  config.fixed_exponent = o.exponent;
  config.paired_height = o.paired_height;
  config.group_hour_month = o.group_hour_month;
  config.daily_maxima = o.daily_maxima;
  config.months = o.months;
  const WindSeries hub = stage("extrapolate", [&] {
    return preprocess_wind(reference, config, lower ? &*lower : nullptr, upper ? &*upper : nullptr);
  });
  out.write("wind.csv", format_wind_csv(hub, !o.daily_maxima));
}

Command absolutized(Command command) {
  std::visit(
      [](auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, SimulateOptions>) o.model = absolute(o.model);
        if constexpr (std::is_same_v<T, TpdmOptions>) o.data = absolute(o.data);
        if constexpr (std::is_same_v<T, FitOptions>) absolutize(o);
        if constexpr (std::is_same_v<T, RiskOptions>) absolutize(o);
        if constexpr (std::is_same_v<T, BootstrapOptions>) absolutize(o.risk);
        if constexpr (std::is_same_v<T, WindOptions>) {
          o.input = absolute(o.input);
          o.paired_lower = absolute(o.paired_lower);
          o.paired_upper = absolute(o.paired_upper);
        }
      },
      command);
  return command;
}

}  // namespace

RunResult run_command(const Command& raw, const std::string& out_dir) {
  const Command command = absolutized(raw);
  OutputDir out(out_dir);
  Warnings warnings;
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, SimulateOptions>) run_simulate(o, out, warnings);
        if constexpr (std::is_same_v<T, TpdmOptions>) run_tpdm(o, out, warnings);
        if constexpr (std::is_same_v<T, FitOptions>) run_fit(o, out, warnings);
        if constexpr (std::is_same_v<T, RiskOptions>) run_risk(o, out, warnings);
        if constexpr (std::is_same_v<T, BootstrapOptions>) run_bootstrap(o, out, warnings);
        if constexpr (std::is_same_v<T, WindOptions>) run_wind(o, out, warnings);
      },
      command);

  RunResult result;
  result.outputs = out.files();
  result.warnings = warnings;
  const json manifest = {
      {"tool", "tailfactor"},
      {"version", kToolVersion},
      {"command", command_name(command)},
      {"options", std::visit([](const auto& o) { return to_json(o); }, command)},
      {"out_dir", absolute(out.path())},
      {"outputs", result.outputs},
      {"simd", std::string(simd::to_string(simd::kernels().isa))},
      {"warnings", warnings}};
  out.write("manifest.json", dump(manifest));
  out.commit();
  return result;
}

RunResult rerun_manifest(const std::string& manifest_path, const std::string& out_dir) {
  const json manifest = stage("manifest", [&] { return json::parse(read_text_file(manifest_path)); });
  const Command command = stage("manifest", [&] {
    return command_from_json(manifest.at("command").get<std::string>(), manifest.at("options"));
  });
  const std::string target =
      out_dir.empty() ? manifest.at("out_dir").get<std::string>() : out_dir;
  return run_command(command, target);
}

}  // namespace tailfactor
