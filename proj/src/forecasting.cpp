#include "ffr/forecasting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ffr/errors.hpp"
#include "ffr/factor_select.hpp"
#include "ffr/lasso.hpp"
#include "ffr/regression.hpp"
#include "ffr/rng.hpp"
#include "ffr/simulation.hpp"

namespace ffr {

namespace {

constexpr Eigen::Index kHours = 24;
constexpr Eigen::Index kMaxLag = 5;

struct DateParts {
  int y = 0, m = 0, d = 0;
};

DateParts parse_date(const std::string& iso) {
  DateParts p;
  char dash1 = 0, dash2 = 0;
  std::istringstream in(iso);
  if (!(in >> p.y >> dash1 >> p.m >> dash2 >> p.d) || dash1 != '-' || dash2 != '-' || p.m < 1 ||
      p.m > 12 || p.d < 1 || p.d > 31)
    throw ingestion_error("bad date: '" + iso + "'");
  return p;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static const int base[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : base[m - 1];
}

std::string format_date(int y, int m, int d) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ingestion_error("bad " + what + " value: '" + s + "'");
  }
}

// Per-day accumulation shared by both schemas, before the weekend filter.
struct RawDay {
  std::string date;
  Eigen::VectorXd price{kHours}, load{kHours}, renew{kHours};
  std::uint32_t hour_mask = 0;
};

MarketDataset finalize(std::vector<RawDay>& days) {
  std::vector<std::string> incomplete;
  for (std::size_t i = 0; i < days.size(); ++i) {
    if (days[i].hour_mask != 0x00FFFFFFu) incomplete.push_back(days[i].date);
    if (i > 0 && days[i].date <= days[i - 1].date)
      throw ingestion_error("dates not strictly increasing at '" + days[i].date + "'");
  }
  if (!incomplete.empty()) {
    std::string msg = "days with missing or duplicate hours:";
    for (const auto& d : incomplete) msg += " " + d;
    throw ingestion_error(msg);
  }

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < days.size(); ++i)
    if (day_of_week(days[i].date) < 5) keep.push_back(i);

  MarketDataset data;
  const Eigen::Index t = static_cast<Eigen::Index>(keep.size());
  data.prices.resize(t, kHours);
  data.load_forecast.resize(t, kHours);
  data.renewables_forecast.resize(t, kHours);
  data.weekday.resize(t);
  for (Eigen::Index r = 0; r < t; ++r) {
    const RawDay& day = days[keep[static_cast<std::size_t>(r)]];
    data.dates.push_back(day.date);
    data.prices.row(r) = day.price.transpose();
    data.load_forecast.row(r) = day.load.transpose();
    data.renewables_forecast.row(r) = day.renew.transpose();
    data.weekday(r) = day_of_week(day.date);
  }
  return data;
}

// Feature block shared by expert and lasso: training rows are window rows
// [lo+5, target), plus the target row's own features in the last row.
struct HourFeatures {
  Eigen::MatrixXd x;       // (n_train + 1) x cols, last row = target features
  Eigen::VectorXd price;   // n_train response values for one hour, set later
  Eigen::Index n_train = 0;
};

Eigen::VectorXd weekday_dummies(int wd) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(4);
  if (wd >= 1 && wd <= 4) d(wd - 1) = 1.0;
  return d;
}

}  // namespace

int day_of_week(const std::string& iso_date) {
  DateParts p = parse_date(iso_date);
  // Sakamoto's method, 0 = Sunday; shifted so 0 = Monday.
  static const int shift[12] = {0, 3, 2, 5, 0, 3, 5, 1, 4, 6, 2, 4};
  int y = p.y - (p.m < 3 ? 1 : 0);
  int dow = (y + y / 4 - y / 100 + y / 400 + shift[p.m - 1] + p.d) % 7;
  return (dow + 6) % 7;
}

GridPtr hour_grid() {
  static const GridPtr grid = make_uniform_grid(0.0, 1.0, kHours);
  return grid;
}

MarketDataset ingest_csv(const std::string& path, CsvSchema schema) {
  std::ifstream in(path);
  if (!in) throw ingestion_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ingestion_error("empty file '" + path + "'");

  std::vector<RawDay> days;
  auto day_for = [&days](const std::string& date) -> RawDay& {
    if (days.empty() || days.back().date != date) {
      days.emplace_back();
      days.back().date = date;
    }
    return days.back();
  };

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (schema == CsvSchema::long_format) {
      if (f.size() != 5) throw ingestion_error("expected 5 columns, got line '" + line + "'");
      RawDay& day = day_for(f[0]);
      long hour = std::lround(parse_number(f[1], "hour"));
      if (hour < 0 || hour >= kHours) throw ingestion_error("hour out of range in '" + line + "'");
      if (day.hour_mask & (1u << hour))
        day.hour_mask = 0;  // duplicate hour, flagged as incomplete in finalize
      day.price(hour) = parse_number(f[2], "price");
      day.load(hour) = parse_number(f[3], "load_fc");
      day.renew(hour) = parse_number(f[4], "renew_fc");
      day.hour_mask |= 1u << hour;
    } else {
      if (f.size() != 1 + 3 * static_cast<std::size_t>(kHours))
        throw ingestion_error("expected 73 columns, got line '" + line + "'");
      RawDay& day = day_for(f[0]);
      for (Eigen::Index h = 0; h < kHours; ++h) {
        day.price(h) = parse_number(f[static_cast<std::size_t>(1 + h)], "price");
        day.load(h) = parse_number(f[static_cast<std::size_t>(1 + kHours + h)], "load_fc");
        day.renew(h) = parse_number(f[static_cast<std::size_t>(1 + 2 * kHours + h)], "renew_fc");
      }
      day.hour_mask = 0x00FFFFFFu;
    }
  }
  return finalize(days);
}

void export_csv(const MarketDataset& data, const std::string& path, CsvSchema schema) {
  std::ofstream out(path);
  if (!out) throw ingestion_error("cannot write '" + path + "'");
  out.precision(17);
  if (schema == CsvSchema::long_format) {
    out << "date,hour,price,load_fc,renew_fc\n";
    for (Eigen::Index t = 0; t < data.T(); ++t)
      for (Eigen::Index h = 0; h < kHours; ++h)
        out << data.dates[static_cast<std::size_t>(t)] << ',' << h << ',' << data.prices(t, h)
            << ',' << data.load_forecast(t, h) << ',' << data.renewables_forecast(t, h) << '\n';
  } else {
    out << "date";
    for (Eigen::Index h = 0; h < kHours; ++h) out << ",price_h" << h;
    for (Eigen::Index h = 0; h < kHours; ++h) out << ",load_h" << h;
    for (Eigen::Index h = 0; h < kHours; ++h) out << ",renew_h" << h;
    out << '\n';
    for (Eigen::Index t = 0; t < data.T(); ++t) {
      out << data.dates[static_cast<std::size_t>(t)];
      for (Eigen::Index h = 0; h < kHours; ++h) out << ',' << data.prices(t, h);
      for (Eigen::Index h = 0; h < kHours; ++h) out << ',' << data.load_forecast(t, h);
      for (Eigen::Index h = 0; h < kHours; ++h) out << ',' << data.renewables_forecast(t, h);
      out << '\n';
    }
  }
}

namespace {

// The nine regressor blocks of the price equation, as (source, lag) pairs.
struct BlockDef {
  const char* id;
  const Eigen::MatrixXd MarketDataset::* source;
  Eigen::Index lag;
};

const BlockDef kBlocks[9] = {
    {"price_lag1", &MarketDataset::prices, 1},
    {"price_lag2", &MarketDataset::prices, 2},
    {"price_lag5", &MarketDataset::prices, 5},
    {"load_lag0", &MarketDataset::load_forecast, 0},
    {"load_lag1", &MarketDataset::load_forecast, 1},
    {"load_lag5", &MarketDataset::load_forecast, 5},
    {"renew_lag0", &MarketDataset::renewables_forecast, 0},
    {"renew_lag1", &MarketDataset::renewables_forecast, 1},
    {"renew_lag5", &MarketDataset::renewables_forecast, 5},
};

// Design over dataset rows [lo, hi); usable responses start at lo + 5.
ElecDesign build_window_design(const MarketDataset& data, Eigen::Index lo, Eigen::Index hi,
                               const std::vector<Eigen::Index>* ks) {
  if (lo < 0 || hi > data.T()) throw std::invalid_argument("build_elec_spec: bad window");
  const Eigen::Index t_eff = hi - lo - kMaxLag;
  if (t_eff < 1) throw std::invalid_argument("build_elec_spec: insufficient history");

  ElecDesign design;
  design.spec.response_id = "price";
  design.spec.scalar_covariate_ids = {"intercept", "tue", "wed", "thu", "fri"};
  for (std::size_t j = 0; j < 9; ++j) {
    FunctionalRegressorSpec r;
    r.id = kBlocks[j].id;
    r.lag = static_cast<int>(kBlocks[j].lag);
    r.K = ks ? (*ks)[j] : 3;
    design.spec.regressors.push_back(r);
  }

  GridPtr grid = hour_grid();
  design.y = {grid, data.prices.middleRows(lo + kMaxLag, t_eff)};
  design.w = Eigen::MatrixXd::Zero(t_eff, 5);
  design.w.col(0).setOnes();
  for (Eigen::Index t = 0; t < t_eff; ++t) {
    design.dates.push_back(data.dates[static_cast<std::size_t>(lo + kMaxLag + t)]);
    int wd = data.weekday(lo + kMaxLag + t);
    if (wd >= 1 && wd <= 4) design.w(t, wd) = 1.0;
  }
  for (const BlockDef& b : kBlocks)
    design.xs.push_back({grid, (data.*b.source).middleRows(lo + kMaxLag - b.lag, t_eff)});
  return design;
}

}  // namespace

ElecDesign build_elec_spec(const MarketDataset& data, Eigen::Index default_k) {
  std::vector<Eigen::Index> ks(9, default_k);
  return build_window_design(data, 0, data.T(), &ks);
}

Eigen::VectorXd naive_forecast(const MarketDataset& data, Eigen::Index target) {
  if (target < kMaxLag || target >= data.T())
    throw std::invalid_argument("naive_forecast: target without a lag-5 predecessor");
  return data.prices.row(target - kMaxLag).transpose();
}

void assert_no_leakage(const std::vector<Eigen::Index>& price_days,
                       const std::vector<Eigen::Index>& forecast_days, Eigen::Index target) {
  for (Eigen::Index d : price_days)
    if (d >= target)
      throw leakage_error("price feature dated at or after the forecast target");
  for (Eigen::Index d : forecast_days)
    if (d > target) throw leakage_error("exogenous forecast dated after the forecast target");
}

namespace {

Eigen::VectorXd expert_window(const MarketDataset& data, Eigen::Index lo, Eigen::Index target,
                              std::vector<std::string>* warnings) {
  if (target - lo < 30 || target >= data.T() || lo + kMaxLag >= target)
    throw std::invalid_argument("expert_forecast: need at least 30 training days");
  const Eigen::Index n = target - lo - kMaxLag;  // training rows lo+5 .. target-1

  Eigen::VectorXd pred(kHours);
  for (Eigen::Index h = 0; h < kHours; ++h) {
    // rows 0..n-1 train, row n = target features
    Eigen::MatrixXd x(n + 1, 10);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i <= n; ++i) {
      const Eigen::Index t = lo + kMaxLag + i;  // i == n gives t == target
      x(i, 0) = 1.0;
      x(i, 1) = data.prices(t - 1, h);
      x(i, 2) = data.prices(t - 2, h);
      x(i, 3) = data.prices(t - 5, h);
      x(i, 4) = data.prices.row(t - 1).minCoeff();
      x(i, 5) = data.prices.row(t - 1).maxCoeff();
      x(i, 6) = data.prices(t - 1, kHours - 1);
      x.block(i, 7, 1, 3) = weekday_dummies(data.weekday(t)).head(3).transpose();
      if (i < n) y(i) = data.prices(t, h);
    }
    // drop exactly duplicated columns (hour 24: the last-hour price equals
    // the lag-1 same-hour price)
    std::vector<Eigen::Index> cols;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      bool dup = false;
      for (Eigen::Index c2 : cols)
        if ((x.col(c) - x.col(c2)).lpNorm<Eigen::Infinity>() == 0.0) dup = true;
      if (!dup) cols.push_back(c);
    }
    Eigen::MatrixXd xk(n + 1, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) xk.col(static_cast<Eigen::Index>(c)) = x.col(cols[c]);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xk.topRows(n));
    if (qr.rank() < xk.cols()) {
      if (warnings)
        warnings->push_back("expert hour " + std::to_string(h) +
                            ": singular design, naive fallback");
      pred(h) = data.prices(target - kMaxLag, h);
      continue;
    }
    Eigen::VectorXd beta = qr.solve(y);
    pred(h) = xk.row(n).dot(beta);
  }
  return pred;
}

// 220 flattened features: 9 curve blocks x 24 hours + 4 weekday dummies.
HourFeatures lasso_features(const MarketDataset& data, Eigen::Index lo, Eigen::Index target) {
  const Eigen::Index n = target - lo - kMaxLag;
  HourFeatures f;
  f.n_train = n;
  f.x.resize(n + 1, 9 * kHours + 4);
  for (Eigen::Index i = 0; i <= n; ++i) {
    const Eigen::Index t = lo + kMaxLag + i;
    Eigen::Index c = 0;
    for (const BlockDef& b : kBlocks) {
      f.x.block(i, c, 1, kHours) = (data.*b.source).row(t - b.lag);
      c += kHours;
    }
    f.x.block(i, c, 1, 4) = weekday_dummies(data.weekday(t)).transpose();
  }
  return f;
}

Eigen::VectorXd lasso_window(const MarketDataset& data, Eigen::Index lo, Eigen::Index target,
                             int cv_folds, std::vector<double>* lambda_cache,
                             std::vector<std::string>* warnings) {
  if (target >= data.T() || target - lo - kMaxLag < static_cast<Eigen::Index>(cv_folds) * 5)
    throw std::invalid_argument("lasso_forecast: need at least cv_folds*5 training days");
  HourFeatures f = lasso_features(data, lo, target);
  const Eigen::MatrixXd x_train = f.x.topRows(f.n_train);

  std::vector<double> local;
  std::vector<double>* lambdas = lambda_cache ? lambda_cache : &local;
  bool tune = lambdas->size() != static_cast<std::size_t>(kHours);
  if (tune) lambdas->assign(static_cast<std::size_t>(kHours), 0.0);

  Eigen::VectorXd pred(kHours);
  for (Eigen::Index h = 0; h < kHours; ++h) {
    Eigen::VectorXd y = data.prices.block(lo + kMaxLag, h, f.n_train, 1);
    if (tune)
      (*lambdas)[static_cast<std::size_t>(h)] = lasso_cv_lambda(x_train, y, cv_folds);
    LassoResult res = lasso_fit(x_train, y, (*lambdas)[static_cast<std::size_t>(h)]);
    if (!res.converged && warnings)
      warnings->push_back("lasso hour " + std::to_string(h) +
                          ": max sweeps reached, using best iterate");
    pred(h) = res.intercept + f.x.row(f.n_train).dot(res.beta);
  }
  return pred;
}

Eigen::VectorXd ffr_window(const MarketDataset& data, Eigen::Index lo, Eigen::Index target,
                           const std::vector<Eigen::Index>& ks) {
  ElecDesign design = build_window_design(data, lo, target, &ks);
  // drop regressors with no selected factors
  ModelSpec spec = design.spec;
  spec.regressors.clear();
  std::vector<CurvePanel> xs;
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < 9; ++j)
    if (ks[j] > 0) {
      spec.regressors.push_back(design.spec.regressors[j]);
      xs.push_back(design.xs[j]);
      kept.push_back(j);
    }
  FFRFit fit = fit_ffr_model(spec, design.y, design.w, xs);

  Eigen::VectorXd w_new(5);
  w_new(0) = 1.0;
  w_new.tail(4) = weekday_dummies(data.weekday(target));
  GridPtr grid = hour_grid();
  std::vector<Curve> x_new;
  for (std::size_t j : kept)
    x_new.push_back(
        {grid, (data.*kBlocks[j].source).row(target - kBlocks[j].lag).transpose()});
  return predict(fit, w_new, x_new).values;
}

}  // namespace

Eigen::VectorXd expert_forecast(const MarketDataset& data, Eigen::Index target,
                                std::vector<std::string>* warnings) {
  return expert_window(data, 0, target, warnings);
}

Eigen::VectorXd lasso_forecast(const MarketDataset& data, Eigen::Index target, int cv_folds,
                               std::vector<double>* lambda_cache,
                               std::vector<std::string>* warnings) {
  return lasso_window(data, 0, target, cv_folds, lambda_cache, warnings);
}

AccuracyMetrics accuracy_metrics(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& actual,
                                 const Eigen::MatrixXd& naive_pred) {
  if (pred.rows() != actual.rows() || pred.cols() != actual.cols() ||
      naive_pred.rows() != actual.rows() || naive_pred.cols() != actual.cols())
    throw std::invalid_argument("accuracy_metrics: shape mismatch");
  Eigen::ArrayXXd e = (pred - actual).array();
  AccuracyMetrics m;
  m.mae = e.abs().mean();
  m.rmse = std::sqrt(e.square().mean());
  double mae_naive = (naive_pred - actual).array().abs().mean();
  m.rmae = mae_naive > 0.0 ? m.mae / mae_naive : (m.mae == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
  return m;
}

ForecastReport rolling_forecast(const MarketDataset& data, ForecastModel model,
                                Eigen::Index train_len, Eigen::Index refit_every,
                                WindowPolicy policy, double gamma) {
  if (train_len >= data.T()) throw std::invalid_argument("rolling_forecast: train_len >= T");
  if (train_len < kMaxLag + 1) throw std::invalid_argument("rolling_forecast: train_len too small");
  if (refit_every < 1) throw std::invalid_argument("rolling_forecast: refit_every < 1");

  ForecastReport report;
  report.model = model;
  report.policy = policy;
  report.train_len = train_len;
  report.refit_every = refit_every;
  report.gamma = gamma;

  const Eigen::Index n_test = data.T() - train_len;
  report.predictions.resize(n_test, kHours);
  report.actual.resize(n_test, kHours);
  report.naive_pred.resize(n_test, kHours);

  std::vector<Eigen::Index> ks(9, 0);
  std::vector<double> lambda_cache;
  const Eigen::Index lasso_retune = std::max<Eigen::Index>(1, n_test / 4);
  double gamma_eff = gamma;

  for (Eigen::Index step = 0; step < n_test; ++step) {
    const Eigen::Index target = train_len + step;
    const Eigen::Index lo = policy == WindowPolicy::rolling ? target - train_len : 0;
    report.test_dates.push_back(data.dates[static_cast<std::size_t>(target)]);
    report.actual.row(step) = data.prices.row(target);

    // every feature the models touch comes from these days
    assert_no_leakage({target - 1, target - 2, target - 5}, {target, target - 1, target - 5},
                      target);
    Eigen::VectorXd naive = naive_forecast(data, target);
    report.naive_pred.row(step) = naive.transpose();

    Eigen::VectorXd pred = naive;
    try {
      switch (model) {
        case ForecastModel::naive:
          break;
        case ForecastModel::expert:
          pred = expert_window(data, lo, target, &report.warnings);
          break;
        case ForecastModel::lasso:
          if (step % lasso_retune == 0) lambda_cache.clear();
          pred = lasso_window(data, lo, target, 10, &lambda_cache, &report.warnings);
          break;
        case ForecastModel::ffr: {
          if (step % refit_every == 0) {
            ElecDesign design = build_window_design(data, lo, target, nullptr);
            if (gamma == 0.0 && step == 0)
              gamma_eff = cross_validate_gamma(design.spec, design.y, design.w, design.xs,
                                               default_gamma_grid(), 0.75, 6);
            for (std::size_t j = 0; j < 9; ++j)
              ks[j] = estimate_num_factors(design.xs[j], design.y, gamma_eff, 6).K_hat;
          }
          pred = ffr_window(data, lo, target, ks);
          break;
        }
      }
    } catch (const std::exception& e) {
      report.warnings.push_back(data.dates[static_cast<std::size_t>(target)] +
                                ": fit failed (" + e.what() + "), naive fallback");
      pred = naive;
    }
    report.predictions.row(step) = pred.transpose();
  }

  report.metrics = accuracy_metrics(report.predictions, report.actual, report.naive_pred);
  return report;
}

MarketDataset synthetic_market(Eigen::Index t, std::uint64_t seed) {
  if (t < 10) throw std::invalid_argument("synthetic_market: need at least 10 days");
  GridPtr grid = hour_grid();
  Eigen::MatrixXd basis(kHours, 3);
  for (Eigen::Index l = 0; l < 3; ++l) basis.col(l) = fourier_basis(l + 1, grid).values;

  CounterRng rng(seed, 0);
  MarketDataset data;
  data.prices.resize(t, kHours);
  data.load_forecast.resize(t, kHours);
  data.renewables_forecast.resize(t, kHours);
  data.weekday.resize(t);

  // working-day calendar starting on a Monday
  int y = 2015, m = 1, d = 5;
  for (Eigen::Index i = 0; i < t; ++i) {
    std::string date = format_date(y, m, d);
    data.dates.push_back(date);
    data.weekday(i) = day_of_week(date);
    int advance = data.weekday(i) == 4 ? 3 : 1;  // skip the weekend after Friday
    for (int k = 0; k < advance; ++k) {
      if (++d > days_in_month(y, m)) {
        d = 1;
        if (++m > 12) {
          m = 1;
          ++y;
        }
      }
    }
  }

  // AR(1) factor scores drive load and renewables; the price is a known
  // functional-linear map of its own lag plus the exogenous curves.
  Eigen::Vector3d a_load = Eigen::Vector3d::Zero();
  Eigen::Vector3d a_renew = Eigen::Vector3d::Zero();
  Eigen::Vector3d b_load(0.8, -0.5, 0.4);
  Eigen::Vector3d b_renew(-0.6, 0.4, -0.3);
  Eigen::Vector3d b_lag(0.5, 0.3, 0.2);
  Eigen::VectorXd prev_price_scores = Eigen::Vector3d::Zero();
  double weekday_bump[5] = {0.0, 0.4, 0.6, 0.5, 1.0};

  for (Eigen::Index i = 0; i < t; ++i) {
    for (int l = 0; l < 3; ++l) {
      a_load(l) = 0.7 * a_load(l) + rng.next_normal();
      a_renew(l) = 0.7 * a_renew(l) + rng.next_normal();
    }
    data.load_forecast.row(i) = (30.0 + (basis * (3.0 * a_load)).array()).transpose();
    data.renewables_forecast.row(i) = (10.0 + (basis * (2.0 * a_renew)).array()).transpose();

    Eigen::VectorXd price = Eigen::VectorXd::Constant(kHours, 40.0 + weekday_bump[data.weekday(i)]);
    price += basis * (b_lag.asDiagonal() * prev_price_scores);
    price += basis * (b_load.asDiagonal() * (3.0 * a_load));
    price += basis * (b_renew.asDiagonal() * (2.0 * a_renew));
    for (Eigen::Index h = 0; h < kHours; ++h) price(h) += 0.3 * rng.next_normal();
    data.prices.row(i) = price.transpose();

    Curve pc{grid, price};
    for (int l = 0; l < 3; ++l)
      prev_price_scores(l) = inner_product(pc, fourier_basis(l + 1, grid)) -
                             (l == 0 ? 40.0 + weekday_bump[data.weekday(i)] : 0.0);
  }
  return data;
}

}  // namespace ffr
