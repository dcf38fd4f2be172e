// tailfactor: command-line front end for the tail factor model pipeline.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tailfactor/error.hpp"
#include "tailfactor/pipeline.hpp"
#include "tailfactor/simd/kernels.hpp"

namespace tf = tailfactor;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitEstimation = 3;

void add_fit_flags(CLI::App* app, tf::FitOptions& o) {
  app->add_option("--data", o.data, "observations CSV (rows = time, columns = sites)")
      ->required()
      ->check(CLI::ExistingFile);
  app->add_option("--k", o.k, "TPDM threshold count (default: 5% of n)");
  app->add_option("--k-prime", o.k_prime, "spectral threshold count (default: k)");
  app->add_option("--k-margin", o.k_margin, "GPD threshold count per margin (default: k)");
  app->add_option("--norm", o.norm, "radial norm")->check(CLI::IsMember({"one", "two", "max"}));
  app->add_option("--kappa", o.kappa_grid, "kappa grid (default: 0.002 to 0.008 by 0.0005)")
      ->delimiter(',');
  app->add_option("--lambda", o.lambda_grid, "lambda grid (default: 1e-5 to 0.001 by 1e-5)")
      ->delimiter(',');
  app->add_option("--projection", o.projection, "simplex projection of loading rows")
      ->check(CLI::IsMember({"both", "on", "off"}));
  app->add_flag("--lower-tail", o.lower_tail, "model the lower tail via 1/x");
  app->add_option("--fista-max-iter", o.fista_max_iter, "FISTA iteration cap");
  app->add_option("--fista-tol", o.fista_tol, "FISTA stopping tolerance");
  app->add_flag("!--no-post-lasso", o.post_lasso, "skip the OLS refit on the Lasso support");
}

void add_risk_flags(CLI::App* app, tf::RiskOptions& o, bool allow_model) {
  add_fit_flags(app, o.fit);
  if (allow_model)
    app->add_option("--model", o.model, "model.json from a previous fit")
        ->check(CLI::ExistingFile);
  app->add_option("--alpha", o.alphas, "capacity fractions in (0, 1]")->delimiter(',');
  app->add_option("--threshold", o.thresholds, "thresholds, each broadcast to all sites")
      ->delimiter(',');
  app->add_option("--thresholds-file", o.thresholds_file, "one threshold per site")
      ->check(CLI::ExistingFile);
  app->add_option("--weights", o.weights, "capacity weights (default: uniform)")
      ->check(CLI::ExistingFile);
}

int exit_code(tf::ErrorKind kind) {
  return kind == tf::ErrorKind::Estimation ? kExitEstimation : kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent factor models for multivariate tail dependence"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tf::kToolVersion));
  std::string out_dir;

  tf::SimulateOptions simulate;
  auto* sim = app.add_subcommand("simulate", "draw a sample from a model configuration");
  sim->add_option("--model", simulate.model, "model configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  sim->add_option("--n", simulate.n, "number of observations")->check(CLI::PositiveNumber);
  sim->add_option("--seed", simulate.seed, "overrides the configuration seed");

  tf::TpdmOptions tpdm;
  auto* tp = app.add_subcommand("tpdm", "empirical TPDM and tail correlations");
  tp->add_option("--data", tpdm.data, "observations CSV")->required()->check(CLI::ExistingFile);
  tp->add_option("--k", tpdm.k, "threshold count (default: 5% of n)");
  tp->add_option("--k-prime", tpdm.k_prime, "tail correlation threshold count (default: k)");
  tp->add_option("--norm", tpdm.norm, "radial norm")->check(CLI::IsMember({"one", "two", "max"}));
  tp->add_flag("--lower-tail", tpdm.lower_tail, "use 1/x");

  tf::FitOptions fit;
  auto* ft = app.add_subcommand("fit", "select and fit a latent factor tail model");
  add_fit_flags(ft, fit);

  tf::RiskOptions risk;
  auto* rk = app.add_subcommand("risk", "joint exceedance probabilities over an alpha grid");
  add_risk_flags(rk, risk, true);

  tf::BootstrapOptions boot;
  auto* bs = app.add_subcommand("bootstrap", "basic bootstrap intervals for the risk grid");
  add_risk_flags(bs, boot.risk, false);
  bs->add_option("--estimator", boot.estimator, "probability estimator")
      ->check(CLI::IsMember({"empirical", "model"}));
  bs->add_option("--replicates", boot.replicates, "bootstrap replicates")
      ->check(CLI::PositiveNumber);
  bs->add_option("--beta", boot.beta, "interval level is 1 - beta")->check(CLI::Range(0.0, 1.0));
  bs->add_option("--seed", boot.seed, "base seed for resampling");

  tf::WindOptions wind;
  auto* wd = app.add_subcommand("preprocess-wind", "extrapolate wind speeds to hub height");
  wd->add_option("--input", wind.input, "speeds at the reference height (m/s)")
      ->required()
      ->check(CLI::ExistingFile);
  wd->add_option("--exponent", wind.exponent, "fixed shear exponent");
  wd->add_option("--paired-lower", wind.paired_lower, "paired speeds at the reference height")
      ->check(CLI::ExistingFile);
  wd->add_option("--paired-upper", wind.paired_upper, "paired speeds at --paired-height")
      ->check(CLI::ExistingFile);
  wd->add_option("--reference-height", wind.reference_height, "meters");
  wd->add_option("--target-height", wind.target_height, "meters");
  wd->add_option("--paired-height", wind.paired_height, "meters");
  wd->add_flag("!--no-grouping", wind.group_hour_month,
               "per-timestamp exponents instead of hour-by-month means");
  wd->add_flag("--daily-maxima", wind.daily_maxima, "reduce to daily maxima");
  wd->add_option("--months", wind.months, "keep only these months (1-12)")
      ->delimiter(',')
      ->check(CLI::Range(1, 12));

  std::string manifest;
  auto* rr = app.add_subcommand("rerun", "replay a run from its manifest.json");
  rr->add_option("--manifest", manifest, "manifest.json")->required()->check(CLI::ExistingFile);

  for (auto* sub : {sim, tp, ft, rk, bs, wd})
    sub->add_option("--out", out_dir, "output directory")->required();
  rr->add_option("--out", out_dir, "output directory (default: the recorded one)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitInput;
  }

  try {
    tf::RunResult result;
    if (*rr) {
      result = tf::rerun_manifest(manifest, out_dir);
    } else {
      tf::Command command;
      if (*sim) command = simulate;
      else if (*tp) command = tpdm;
      else if (*ft) command = fit;
      else if (*rk) command = risk;
      else if (*bs) command = boot;
      else command = wind;
      result = tf::run_command(command, out_dir);
    }
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    return 0;
  } catch (const tf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
}
