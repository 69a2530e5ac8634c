#include "ffr/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ffr/errors.hpp"

namespace ffr {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.precision(17);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

std::vector<double> parse_row(const std::string& line) {
  std::vector<double> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(std::stod(field));
  return out;
}

GridPtr grid_from_points(const std::vector<double>& pts, std::size_t from = 0) {
  const Eigen::Index p = static_cast<Eigen::Index>(pts.size() - from);
  if (p < 2) throw std::runtime_error("grid header needs at least 2 points");
  // uniform grids round-trip exactly through make_uniform_grid
  return make_uniform_grid(pts[from], pts.back(), p);
}

}  // namespace

void write_panel_csv(const CurvePanel& panel, const std::string& path) {
  std::ofstream out = open_out(path);
  for (Eigen::Index j = 0; j < panel.grid->size(); ++j)
    out << (j ? "," : "") << panel.grid->points(j);
  out << '\n';
  for (Eigen::Index t = 0; t < panel.rows(); ++t) {
    for (Eigen::Index j = 0; j < panel.values.cols(); ++j)
      out << (j ? "," : "") << panel.values(t, j);
    out << '\n';
  }
}

CurvePanel read_panel_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty panel file '" + path + "'");
  GridPtr grid = grid_from_points(parse_row(line));
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(parse_row(line));
  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), grid->size());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (static_cast<Eigen::Index>(rows[t].size()) != grid->size())
      throw std::runtime_error("ragged panel row in '" + path + "'");
    for (Eigen::Index j = 0; j < grid->size(); ++j)
      values(static_cast<Eigen::Index>(t), j) = rows[t][static_cast<std::size_t>(j)];
  }
  return {grid, values};
}

void write_curve_csv(const Curve& curve, const std::string& path) {
  write_panel_csv({curve.grid, curve.values.transpose()}, path);
}

Curve read_curve_csv(const std::string& path) {
  CurvePanel panel = read_panel_csv(path);
  if (panel.rows() != 1) throw std::runtime_error("expected a single curve in '" + path + "'");
  return panel.row(0);
}

void write_kernel_csv(const Kernel& kernel, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "r\\s";
  for (Eigen::Index j = 0; j < kernel.col_grid->size(); ++j) out << ',' << kernel.col_grid->points(j);
  out << '\n';
  for (Eigen::Index i = 0; i < kernel.row_grid->size(); ++i) {
    out << kernel.row_grid->points(i);
    for (Eigen::Index j = 0; j < kernel.col_grid->size(); ++j) out << ',' << kernel.values(i, j);
    out << '\n';
  }
}

Kernel read_kernel_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty kernel file '" + path + "'");
  std::vector<double> header;
  {
    std::istringstream hs(line);
    std::string field;
    std::getline(hs, field, ',');  // corner cell
    while (std::getline(hs, field, ',')) header.push_back(std::stod(field));
  }
  GridPtr col_grid = grid_from_points(header);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(parse_row(line));
  std::vector<double> row_pts;
  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), col_grid->size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != col_grid->size() + 1)
      throw std::runtime_error("ragged kernel row in '" + path + "'");
    row_pts.push_back(rows[i][0]);
    for (Eigen::Index j = 0; j < col_grid->size(); ++j)
      values(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j + 1)];
  }
  return {grid_from_points(row_pts), col_grid, values};
}

nlohmann::json ed_result_to_json(const EDResult& result) {
  nlohmann::json j;
  j["K_hat"] = result.K_hat;
  j["gamma"] = result.gamma;
  j["scale_c"] = result.scale_c;
  j["hit_upper_bound"] = result.hit_upper_bound;
  j["g_sequence"] = std::vector<double>(result.g_sequence.data(),
                                        result.g_sequence.data() + result.g_sequence.size());
  return j;
}

nlohmann::json simulation_report_to_json(const SimulationReport& report) {
  nlohmann::json j;
  j["variant"] = report.variant == DGPVariant::homoskedastic ? "homo" : "hetero";
  j["reps"] = report.reps;
  j["seed"] = report.seed;
  // runtime is intentionally not serialized so identical configurations
  // produce byte-identical reports
  j["cells"] = nlohmann::json::array();
  for (const SimulationCell& c : report.cells) {
    nlohmann::json cell;
    cell["T"] = c.T;
    cell["bias_true_param"] = c.bias_true_param;
    cell["bias_ffr"] = c.bias_ffr;
    cell["coverage_true_param"] = c.coverage_true_param;
    cell["coverage_uncorrected"] = c.coverage_uncorrected;
    cell["coverage_ffr"] = c.coverage_ffr;
    j["cells"].push_back(cell);
  }
  return j;
}

nlohmann::json forecast_report_to_json(const ForecastReport& report) {
  static const char* model_names[] = {"ffr", "lasso", "expert", "naive"};
  nlohmann::json j;
  j["model"] = model_names[static_cast<int>(report.model)];
  j["policy"] = report.policy == WindowPolicy::expanding ? "expanding" : "rolling";
  j["train_len"] = report.train_len;
  j["refit_every"] = report.refit_every;
  j["gamma"] = report.gamma;
  j["mae"] = report.metrics.mae;
  j["rmae"] = report.metrics.rmae;
  j["rmse"] = report.metrics.rmse;
  j["test_dates"] = report.test_dates;
  j["warnings"] = report.warnings;
  return j;
}

std::uint64_t config_hash(const nlohmann::json& config) {
  const std::string dump = config.dump();  // nlohmann keeps keys sorted
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

void write_json(const nlohmann::json& doc, const std::string& path) {
  std::ofstream out = open_out(path);
  out << doc.dump(2) << '\n';
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in = open_in(path);
  return nlohmann::json::parse(in);
}

void save_fit_bundle(const FFRFit& fit, const std::string& dir, const nlohmann::json& config) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["config"] = config;
  manifest["config_hash"] = config_hash(config);
  manifest["condition_number"] = fit.condition_number;
  manifest["files"] = nlohmann::json::array();
  auto record = [&](const std::string& name, const std::string& role) {
    nlohmann::json f;
    f["file"] = name;
    f["role"] = role;
    manifest["files"].push_back(f);
  };

  write_panel_csv(fit.residuals, dir + "/residuals.csv");
  record("residuals.csv", "residual panel");
  write_curve_csv(reconstruct_intercept(fit), dir + "/intercept.csv");
  record("intercept.csv", "intercept curve");
  for (Eigen::Index j = 0; j < fit.spec.n_functional(); ++j) {
    const std::string& id = fit.spec.regressors[static_cast<std::size_t>(j)].id;
    write_kernel_csv(coefficient_surface(fit, j), dir + "/beta_" + id + ".csv");
    record("beta_" + id + ".csv", "coefficient surface " + id);
    const FactorModel& fm = fit.factor_models[static_cast<std::size_t>(j)];
    CurvePanel loadings{fm.mean.grid,
                        Eigen::MatrixXd(fm.K, fm.mean.grid->size())};
    for (Eigen::Index l = 0; l < fm.K; ++l)
      loadings.values.row(l) = fm.loadings[static_cast<std::size_t>(l)].values.transpose();
    write_panel_csv(loadings, dir + "/loadings_" + id + ".csv");
    record("loadings_" + id + ".csv", "factor loadings " + id);
    manifest["eigenvalues"][id] = std::vector<double>(
        fm.eigenvalues.data(), fm.eigenvalues.data() + fm.eigenvalues.size());
  }
  write_json(manifest, dir + "/manifest.json");
}

}  // namespace ffr
