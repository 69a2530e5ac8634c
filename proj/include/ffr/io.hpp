#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "ffr/factor_select.hpp"
#include "ffr/forecasting.hpp"
#include "ffr/grid.hpp"
#include "ffr/regression.hpp"
#include "ffr/simulation.hpp"

namespace ffr {

// CSV conventions: panels carry the grid coordinates as the header row;
// kernels carry the column grid in the header and the row grid in the first
// column ("r\s" corner cell).
void write_panel_csv(const CurvePanel& panel, const std::string& path);
CurvePanel read_panel_csv(const std::string& path);

void write_curve_csv(const Curve& curve, const std::string& path);
Curve read_curve_csv(const std::string& path);

void write_kernel_csv(const Kernel& kernel, const std::string& path);
Kernel read_kernel_csv(const std::string& path);

nlohmann::json ed_result_to_json(const EDResult& result);
nlohmann::json simulation_report_to_json(const SimulationReport& report);
nlohmann::json forecast_report_to_json(const ForecastReport& report);

// FNV-1a over the canonical (sorted-key) JSON dump; links artifacts to the
// configuration that produced them.
std::uint64_t config_hash(const nlohmann::json& config);

void write_json(const nlohmann::json& doc, const std::string& path);
nlohmann::json read_json(const std::string& path);

// Fit bundle: manifest.json plus CSV files for the coefficient curves and
// surfaces, every file listed in the manifest with the config hash.
void save_fit_bundle(const FFRFit& fit, const std::string& dir, const nlohmann::json& config);

}  // namespace ffr
