#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ffr/grid.hpp"
#include "ffr/regression_spec.hpp"

namespace ffr {

// Day-ahead market data on working days, hourly resolution.
struct MarketDataset {
  std::vector<std::string> dates;       // ISO yyyy-mm-dd, strictly ascending
  Eigen::MatrixXd prices;               // T x 24
  Eigen::MatrixXd load_forecast;        // T x 24
  Eigen::MatrixXd renewables_forecast;  // T x 24
  Eigen::VectorXi weekday;              // 0 = Monday .. 4 = Friday

  Eigen::Index T() const { return static_cast<Eigen::Index>(dates.size()); }
};

enum class CsvSchema { long_format, wide_format };

// Long format: date,hour,price,load_fc,renew_fc with hour in 0..23.
// Wide format: date,price_h0..23,load_h0..23,renew_h0..23.
// Weekend rows are dropped; incomplete days and non-monotone dates raise
// ingestion_error.
MarketDataset ingest_csv(const std::string& path, CsvSchema schema);
void export_csv(const MarketDataset& data, const std::string& path, CsvSchema schema);

// 0 = Monday .. 6 = Sunday for an ISO date string.
int day_of_week(const std::string& iso_date);

// Hour-of-day grid: 24 points on [0,1].
GridPtr hour_grid();

// Price regression design: response P_t; functional regressors
// P_{t-1}, P_{t-2}, P_{t-5}, L_t, L_{t-1}, L_{t-5}, G_t, G_{t-1}, G_{t-5};
// scalars intercept + Tue..Fri dummies (Monday reference). Rows 0..4 of the
// dataset are trimmed because of the lag-5 terms.
struct ElecDesign {
  ModelSpec spec;
  CurvePanel y;
  Eigen::MatrixXd w;               // T' x 5
  std::vector<CurvePanel> xs;      // 9 panels, T' x 24
  std::vector<std::string> dates;  // aligned with rows of y
};

ElecDesign build_elec_spec(const MarketDataset& data, Eigen::Index default_k = 3);

// Price curve from five working days before the target row.
Eigen::VectorXd naive_forecast(const MarketDataset& data, Eigen::Index target);

// Per-hour OLS on same-hour lags 1/2/5, previous day's min/max and last-hour
// price, and weekday dummies; duplicated columns removed. Singular designs
// fall back to the naive forecast for that hour.
Eigen::VectorXd expert_forecast(const MarketDataset& data, Eigen::Index target,
                                std::vector<std::string>* warnings = nullptr);

// Per-hour lasso on all 24 hours of every block of the price design
// (9 x 24 + 4 weekday dummies = 220 columns + intercept). lambda_cache holds
// one lambda per hour; when empty it is filled by cross-validation.
Eigen::VectorXd lasso_forecast(const MarketDataset& data, Eigen::Index target, int cv_folds = 10,
                               std::vector<double>* lambda_cache = nullptr,
                               std::vector<std::string>* warnings = nullptr);

// Guard against target-day information entering the feature set: price
// features must predate the target; exogenous forecasts may be dated up to
// the target day itself. Throws leakage_error.
void assert_no_leakage(const std::vector<Eigen::Index>& price_days,
                       const std::vector<Eigen::Index>& forecast_days, Eigen::Index target);

enum class ForecastModel { ffr, lasso, expert, naive };
enum class WindowPolicy { expanding, rolling };

struct AccuracyMetrics {
  double mae = 0.0;
  double rmae = 0.0;
  double rmse = 0.0;
};

AccuracyMetrics accuracy_metrics(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& actual,
                                 const Eigen::MatrixXd& naive_pred);

struct ForecastReport {
  ForecastModel model = ForecastModel::naive;
  WindowPolicy policy = WindowPolicy::expanding;
  Eigen::Index train_len = 0;
  Eigen::Index refit_every = 0;
  double gamma = 0.0;  // 0 means cross-validated
  std::vector<std::string> test_dates;
  Eigen::MatrixXd predictions;  // n_test x 24
  Eigen::MatrixXd actual;
  Eigen::MatrixXd naive_pred;
  AccuracyMetrics metrics;
  std::vector<std::string> warnings;  // per-day fit issues
};

// One-day-ahead walk through rows [train_len, T): fit on the trailing
// (rolling) or anchored (expanding) window, predict the next day. The FFR
// model re-selects factor counts only at refit points; coefficients are
// re-estimated daily.
ForecastReport rolling_forecast(const MarketDataset& data, ForecastModel model,
                                Eigen::Index train_len, Eigen::Index refit_every = 7,
                                WindowPolicy policy = WindowPolicy::expanding, double gamma = 0.0);

// Synthetic working-day market generated from a known FFR process, for
// harness tests and demos.
MarketDataset synthetic_market(Eigen::Index t, std::uint64_t seed);

}  // namespace ffr
