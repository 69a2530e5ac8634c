#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ffr/errors.hpp"
#include "ffr/factor_select.hpp"
#include "ffr/forecasting.hpp"
#include "ffr/inference.hpp"
#include "ffr/io.hpp"
#include "ffr/regression.hpp"
#include "ffr/simulation.hpp"
#include "ffr/smoothing.hpp"

namespace {

using nlohmann::json;

// Configuration precedence: built-in defaults < JSON config file < CLI flags.
// The config file is applied before parsing, so flags that appear on the
// command line always win.
json load_config(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") return ffr::read_json(argv[i + 1]);
  return json::object();
}

template <typename T>
void from_config(const json& cfg, const std::string& key, T& value) {
  if (cfg.contains(key)) value = cfg.at(key).get<T>();
}

// Manifest written next to every artifact set: config, its hash, file list.
void write_manifest(const std::string& path, const json& config,
                    const std::vector<std::string>& files) {
  json manifest;
  manifest["config"] = config;
  manifest["config_hash"] = ffr::config_hash(config);
  manifest["files"] = files;
  ffr::write_json(manifest, path);
}

ffr::ModelSpec single_regressor_spec(Eigen::Index k) {
  ffr::ModelSpec spec;
  spec.regressors.push_back({"x", 0, k});
  return spec;
}

double resolve_gamma(const std::string& gamma_str, const ffr::ModelSpec& spec,
                     const ffr::CurvePanel& y, const Eigen::MatrixXd& w,
                     const std::vector<ffr::CurvePanel>& xs, Eigen::Index k_max) {
  if (gamma_str == "auto")
    return ffr::cross_validate_gamma(spec, y, w, xs, ffr::default_gamma_grid(), 0.75, k_max);
  return std::stod(gamma_str);
}

int cmd_smooth(const json& cfg, const std::string& input, int degree, int n_basis, int grid_p,
               const std::string& out) {
  ffr::CurvePanel raw = ffr::read_panel_csv(input);
  ffr::GridPtr target = ffr::make_uniform_grid(raw.grid->a, raw.grid->b,
                                               grid_p > 0 ? grid_p : raw.grid->size());
  ffr::CurvePanel smoothed;
  if (n_basis > 0) {
    ffr::BSplineBasis basis = ffr::build_bspline_basis(raw.grid, degree, n_basis);
    smoothed = ffr::smooth_panel(raw.values, raw.grid->points, basis, target);
  } else {
    smoothed = ffr::passthrough_panel(raw.values, raw.grid);
  }
  ffr::write_panel_csv(smoothed, out);
  write_manifest(out + ".manifest.json", cfg, {out});
  return 0;
}

int cmd_factors(const json& cfg, const std::string& x_path, const std::string& y_path,
                const std::string& gamma_str, Eigen::Index k_max, const std::string& out) {
  ffr::CurvePanel x = ffr::read_panel_csv(x_path);
  ffr::CurvePanel y = ffr::read_panel_csv(y_path);
  Eigen::MatrixXd w = Eigen::MatrixXd::Ones(y.rows(), 1);
  double gamma = resolve_gamma(gamma_str, single_regressor_spec(0), y, w, {x}, k_max);
  ffr::EDResult result = ffr::estimate_num_factors(x, y, gamma, k_max);
  json doc = ffr::ed_result_to_json(result);
  // scree data: the leading eigenvalue sequence of the D operator
  ffr::EigenPairs pairs =
      ffr::eigen_integral_operator(ffr::d_kernel(ffr::cross_cov_kernel(x, y)),
                                   std::min<Eigen::Index>(k_max + 1, x.grid->size()));
  doc["scree"] = std::vector<double>(pairs.eigenvalues.data(),
                                     pairs.eigenvalues.data() + pairs.eigenvalues.size());
  doc["config_hash"] = ffr::config_hash(cfg);
  ffr::write_json(doc, out);
  write_manifest(out + ".manifest.json", cfg, {out});
  return 0;
}

ffr::FFRFit fit_from_files(const std::string& y_path, const std::vector<std::string>& x_paths,
                           std::vector<Eigen::Index> ks, const std::string& gamma_str,
                           Eigen::Index k_max, ffr::CurvePanel& y_out) {
  y_out = ffr::read_panel_csv(y_path);
  std::vector<ffr::CurvePanel> xs;
  for (const auto& p : x_paths) xs.push_back(ffr::read_panel_csv(p));
  if (ks.empty()) ks.assign(x_paths.size(), 0);
  if (ks.size() == 1 && x_paths.size() > 1) ks.assign(x_paths.size(), ks[0]);
  if (ks.size() != x_paths.size())
    throw CLI::ValidationError("--k", "need one value per regressor (or one shared value)");

  ffr::ModelSpec spec;
  for (std::size_t j = 0; j < xs.size(); ++j)
    spec.regressors.push_back({"x" + std::to_string(j + 1), 0, ks[j]});
  Eigen::MatrixXd w = Eigen::MatrixXd::Ones(y_out.rows(), 1);

  bool need_selection = false;
  for (Eigen::Index k : ks)
    if (k == 0) need_selection = true;
  if (need_selection) {
    double gamma = resolve_gamma(gamma_str, spec, y_out, w, xs, k_max);
    for (std::size_t j = 0; j < xs.size(); ++j)
      if (spec.regressors[j].K == 0)
        spec.regressors[j].K = ffr::estimate_num_factors(xs[j], y_out, gamma, k_max).K_hat;
    for (std::size_t j = 0; j < xs.size(); ++j)
      if (spec.regressors[j].K == 0)
        throw CLI::ValidationError("--k", "regressor " + std::to_string(j + 1) +
                                             " selected K=0; drop it or set --k explicitly");
  }
  return ffr::fit_ffr_model(spec, y_out, w, xs);
}

int cmd_fit(const json& cfg, const std::string& y_path, const std::vector<std::string>& x_paths,
            const std::vector<Eigen::Index>& ks, const std::string& gamma_str, Eigen::Index k_max,
            const std::string& out_dir) {
  ffr::CurvePanel y;
  ffr::FFRFit fit = fit_from_files(y_path, x_paths, ks, gamma_str, k_max, y);
  ffr::save_fit_bundle(fit, out_dir, cfg);
  return 0;
}

int cmd_infer(const json& cfg, const std::string& y_path, const std::vector<std::string>& x_paths,
              const std::vector<Eigen::Index>& ks, const std::string& gamma_str, Eigen::Index k_max,
              Eigen::Index regressor, double level, bool uncorrected,
              const std::string& out_dir) {
  ffr::CurvePanel y;
  ffr::FFRFit fit = fit_from_files(y_path, x_paths, ks, gamma_str, k_max, y);
  if (regressor < 1 || regressor > fit.spec.n_functional())
    throw CLI::ValidationError("--regressor", "index out of range");
  ffr::InferenceResult inf = ffr::make_inference(fit, y, regressor - 1, level, !uncorrected);

  std::filesystem::create_directories(out_dir);
  ffr::write_kernel_csv(ffr::coefficient_surface(fit, regressor - 1), out_dir + "/beta.csv");
  ffr::write_kernel_csv(inf.omega, out_dir + "/omega.csv");
  ffr::write_kernel_csv(inf.se, out_dir + "/se.csv");
  ffr::write_kernel_csv(inf.ci_lower, out_dir + "/ci_lower.csv");
  ffr::write_kernel_csv(inf.ci_upper, out_dir + "/ci_upper.csv");
  ffr::write_kernel_csv(inf.p_values, out_dir + "/p_values.csv");
  json contours;
  contours["p_value_contour_levels"] = {0.01, 0.05, 0.1};
  contours["confidence_level"] = level;
  contours["corrected"] = !uncorrected;
  ffr::write_json(contours, out_dir + "/contours.json");
  write_manifest(out_dir + "/manifest.json", cfg,
                 {"beta.csv", "omega.csv", "se.csv", "ci_lower.csv", "ci_upper.csv",
                  "p_values.csv", "contours.json"});
  return 0;
}

int cmd_simulate(const json& cfg, const std::string& variant_str,
                 const std::vector<Eigen::Index>& t_list, Eigen::Index reps, std::uint64_t seed,
                 Eigen::Index grid_p, int workers, const std::string& out) {
  ffr::DGPVariant variant =
      variant_str == "hetero" ? ffr::DGPVariant::heteroskedastic : ffr::DGPVariant::homoskedastic;
  ffr::SimulationReport report =
      ffr::run_monte_carlo(reps, t_list, variant, seed, grid_p, workers);
  json doc = ffr::simulation_report_to_json(report);
  doc["config_hash"] = ffr::config_hash(cfg);
  ffr::write_json(doc, out);
  write_manifest(out + ".manifest.json", cfg, {out});
  return 0;
}

int cmd_forecast(const json& cfg, const std::string& data_path, const std::string& schema_str,
                 const std::string& model_str, Eigen::Index train_days,
                 const std::string& policy_str, const std::string& gamma_str,
                 Eigen::Index refit_every, const std::string& out, const std::string& pred_csv) {
  ffr::MarketDataset data = ffr::ingest_csv(
      data_path,
      schema_str == "wide" ? ffr::CsvSchema::wide_format : ffr::CsvSchema::long_format);
  ffr::ForecastModel model = ffr::ForecastModel::naive;
  if (model_str == "ffr") model = ffr::ForecastModel::ffr;
  else if (model_str == "lasso") model = ffr::ForecastModel::lasso;
  else if (model_str == "expert") model = ffr::ForecastModel::expert;
  else if (model_str != "naive")
    throw CLI::ValidationError("--model", "expected ffr|lasso|expert|naive");
  ffr::WindowPolicy policy =
      policy_str == "rolling" ? ffr::WindowPolicy::rolling : ffr::WindowPolicy::expanding;
  double gamma = gamma_str == "auto" ? 0.0 : std::stod(gamma_str);

  ffr::ForecastReport report =
      ffr::rolling_forecast(data, model, train_days, refit_every, policy, gamma);
  json doc = ffr::forecast_report_to_json(report);
  doc["config_hash"] = ffr::config_hash(cfg);
  ffr::write_json(doc, out);

  std::vector<std::string> files = {out};
  if (!pred_csv.empty()) {
    std::ofstream pc(pred_csv);
    pc.precision(17);
    pc << "date";
    for (int h = 0; h < 24; ++h) pc << ",pred_h" << h;
    for (int h = 0; h < 24; ++h) pc << ",actual_h" << h;
    pc << '\n';
    for (Eigen::Index t = 0; t < report.predictions.rows(); ++t) {
      pc << report.test_dates[static_cast<std::size_t>(t)];
      for (int h = 0; h < 24; ++h) pc << ',' << report.predictions(t, h);
      for (int h = 0; h < 24; ++h) pc << ',' << report.actual(t, h);
      pc << '\n';
    }
    files.push_back(pred_csv);
  }
  write_manifest(out + ".manifest.json", cfg, files);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional factor regression toolkit"};
  app.require_subcommand(1);

  json cfg;
  try {
    cfg = load_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: bad config file: " << e.what() << '\n';
    return 2;
  }
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override it)");

  std::uint64_t seed = 1;
  int workers = 0;
  from_config(cfg, "seed", seed);
  from_config(cfg, "workers", workers);
  app.add_option("--seed", seed, "top-level RNG seed");
  app.add_option("--workers", workers, "worker thread bound, 0 = hardware");

  // smooth
  std::string sm_input, sm_out = "smoothed.csv";
  int sm_degree = 3, sm_nbasis = 0, sm_gridp = 0;
  from_config(cfg, "input", sm_input);
  from_config(cfg, "degree", sm_degree);
  from_config(cfg, "n_basis", sm_nbasis);
  from_config(cfg, "grid_p", sm_gridp);
  CLI::App* smooth = app.add_subcommand("smooth", "B-spline smoothing of a raw panel");
  smooth->add_option("--input", sm_input, "raw panel CSV")->required(cfg.contains("input") == false);
  smooth->add_option("--degree", sm_degree, "spline degree");
  smooth->add_option("--n-basis", sm_nbasis, "basis size, 0 = passthrough");
  smooth->add_option("--grid-p", sm_gridp, "target grid size, 0 = keep input grid");
  smooth->add_option("--out", sm_out, "output panel CSV");

  // factors
  std::string fa_x, fa_y, fa_gamma = "auto", fa_out = "factors.json";
  Eigen::Index fa_kmax = 10;
  from_config(cfg, "x", fa_x);
  from_config(cfg, "y", fa_y);
  from_config(cfg, "gamma", fa_gamma);
  from_config(cfg, "k_max", fa_kmax);
  CLI::App* factors = app.add_subcommand("factors", "eigenvalue-difference factor count");
  factors->add_option("--x", fa_x, "regressor panel CSV")->required(!cfg.contains("x"));
  factors->add_option("--y", fa_y, "response panel CSV")->required(!cfg.contains("y"));
  factors->add_option("--gamma", fa_gamma, "sensitivity, number or 'auto'");
  factors->add_option("--k-max", fa_kmax, "upper bound for K");
  factors->add_option("--out", fa_out, "output JSON");

  // fit / infer share inputs
  std::string ft_y, ft_gamma = "auto", ft_outdir = "fit_bundle";
  std::vector<std::string> ft_x;
  std::vector<Eigen::Index> ft_k;
  Eigen::Index ft_kmax = 10;
  from_config(cfg, "y", ft_y);
  from_config(cfg, "gamma", ft_gamma);
  from_config(cfg, "k_max", ft_kmax);
  if (cfg.contains("x_list")) ft_x = cfg.at("x_list").get<std::vector<std::string>>();
  if (cfg.contains("k_list")) ft_k = cfg.at("k_list").get<std::vector<Eigen::Index>>();
  CLI::App* fit = app.add_subcommand("fit", "fit the functional factor regression");
  fit->add_option("--y", ft_y, "response panel CSV")->required(!cfg.contains("y"));
  fit->add_option("--x", ft_x, "regressor panel CSV (repeatable)")->required(!cfg.contains("x_list"));
  fit->add_option("--k", ft_k, "factor count per regressor, 0 = select");
  fit->add_option("--gamma", ft_gamma, "selection sensitivity, number or 'auto'");
  fit->add_option("--k-max", ft_kmax, "upper bound for K");
  fit->add_option("--out-dir", ft_outdir, "bundle output directory");

  Eigen::Index in_regressor = 1;
  double in_level = 0.95;
  bool in_uncorrected = false;
  std::string in_outdir = "inference";
  from_config(cfg, "regressor", in_regressor);
  from_config(cfg, "level", in_level);
  from_config(cfg, "uncorrected", in_uncorrected);
  CLI::App* infer = app.add_subcommand("infer", "covariance surface, bands and p-values");
  infer->add_option("--y", ft_y, "response panel CSV")->required(!cfg.contains("y"));
  infer->add_option("--x", ft_x, "regressor panel CSV (repeatable)")->required(!cfg.contains("x_list"));
  infer->add_option("--k", ft_k, "factor count per regressor, 0 = select");
  infer->add_option("--gamma", ft_gamma, "selection sensitivity, number or 'auto'");
  infer->add_option("--k-max", ft_kmax, "upper bound for K");
  infer->add_option("--regressor", in_regressor, "1-based regressor index");
  infer->add_option("--level", in_level, "confidence level")->check(CLI::Range(0.5, 0.9999));
  infer->add_flag("--uncorrected", in_uncorrected, "drop the generated-regressors correction");
  infer->add_option("--out-dir", in_outdir, "output directory");

  // simulate
  std::string si_variant = "homo", si_out = "simulation.json";
  std::vector<Eigen::Index> si_t = {100};
  Eigen::Index si_reps = 100, si_p = 200;
  from_config(cfg, "variant", si_variant);
  from_config(cfg, "reps", si_reps);
  from_config(cfg, "grid_p", si_p);
  if (cfg.contains("t_list")) si_t = cfg.at("t_list").get<std::vector<Eigen::Index>>();
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo coverage study");
  simulate->add_option("--variant", si_variant, "homo|hetero")
      ->check(CLI::IsMember({"homo", "hetero"}));
  simulate->add_option("--T", si_t, "sample sizes (repeatable)");
  simulate->add_option("--reps", si_reps, "replications")->check(CLI::PositiveNumber);
  simulate->add_option("--grid-p", si_p, "grid resolution")->check(CLI::Range(10, 2000));
  simulate->add_option("--out", si_out, "output JSON");

  // forecast
  std::string fo_data, fo_schema = "long", fo_model = "ffr", fo_policy = "expanding",
              fo_gamma = "auto", fo_out = "forecast.json", fo_pred;
  Eigen::Index fo_train = 100, fo_refit = 7;
  from_config(cfg, "data", fo_data);
  from_config(cfg, "schema", fo_schema);
  from_config(cfg, "model", fo_model);
  from_config(cfg, "policy", fo_policy);
  from_config(cfg, "gamma", fo_gamma);
  from_config(cfg, "train_days", fo_train);
  from_config(cfg, "refit_every", fo_refit);
  CLI::App* forecast = app.add_subcommand("forecast", "rolling day-ahead price forecast");
  forecast->add_option("--data", fo_data, "market CSV")->required(!cfg.contains("data"));
  forecast->add_option("--schema", fo_schema, "long|wide")->check(CLI::IsMember({"long", "wide"}));
  forecast->add_option("--model", fo_model, "ffr|lasso|expert|naive")
      ->check(CLI::IsMember({"ffr", "lasso", "expert", "naive"}));
  forecast->add_option("--train-days", fo_train, "initial training window")
      ->check(CLI::PositiveNumber);
  forecast->add_option("--policy", fo_policy, "expanding|rolling")
      ->check(CLI::IsMember({"expanding", "rolling"}));
  forecast->add_option("--gamma", fo_gamma, "factor selection sensitivity or 'auto'");
  forecast->add_option("--refit-every", fo_refit, "days between K re-selections")
      ->check(CLI::PositiveNumber);
  forecast->add_option("--out", fo_out, "report JSON");
  forecast->add_option("--pred-csv", fo_pred, "per-day prediction CSV");

  // global options (--seed, --workers, --config) may appear after the
  // subcommand name
  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  // echo of the effective configuration, hashed into every manifest
  json effective = cfg;
  effective["seed"] = seed;
  effective["workers"] = workers;

  try {
    if (smooth->parsed()) {
      effective["command"] = "smooth";
      return cmd_smooth(effective, sm_input, sm_degree, sm_nbasis, sm_gridp, sm_out);
    }
    if (factors->parsed()) {
      effective["command"] = "factors";
      return cmd_factors(effective, fa_x, fa_y, fa_gamma, fa_kmax, fa_out);
    }
    if (fit->parsed()) {
      effective["command"] = "fit";
      return cmd_fit(effective, ft_y, ft_x, ft_k, ft_gamma, ft_kmax, ft_outdir);
    }
    if (infer->parsed()) {
      effective["command"] = "infer";
      return cmd_infer(effective, ft_y, ft_x, ft_k, ft_gamma, ft_kmax, in_regressor, in_level,
                       in_uncorrected, in_outdir);
    }
    if (simulate->parsed()) {
      effective["command"] = "simulate";
      effective["variant"] = si_variant;
      effective["reps"] = si_reps;
      effective["t_list"] = si_t;
      return cmd_simulate(effective, si_variant, si_t, si_reps, seed, si_p, workers, si_out);
    }
    if (forecast->parsed()) {
      effective["command"] = "forecast";
      return cmd_forecast(effective, fo_data, fo_schema, fo_model, fo_train, fo_policy, fo_gamma,
                          fo_refit, fo_out, fo_pred);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
