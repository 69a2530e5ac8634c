#include "ffr/simulation.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "ffr/factor_select.hpp"
#include "ffr/inference.hpp"
#include "ffr/primitives.hpp"
#include "ffr/regression.hpp"
#include "ffr/rng.hpp"
#include "ffr/stats.hpp"

namespace ffr {

Curve fourier_basis(Eigen::Index l, const GridPtr& grid) {
  if (l < 1) throw std::invalid_argument("fourier_basis: index starts at 1");
  Eigen::VectorXd v(grid->size());
  if (l == 1) {
    v.setOnes();
  } else if (l % 2 == 0) {
    double z = static_cast<double>(l / 2);
    v = (std::sqrt(2.0) * (2.0 * z * M_PI * grid->points.array()).sin()).matrix();
  } else {
    double z = static_cast<double>((l - 1) / 2);
    v = (std::sqrt(2.0) * (2.0 * z * M_PI * grid->points.array()).cos()).matrix();
  }
  return {grid, v};
}

Curve bernstein_basis(Eigen::Index i, Eigen::Index total, const GridPtr& grid) {
  if (i < 1 || i > total) throw std::invalid_argument("bernstein_basis: index out of range");
  double binom = 1.0;
  for (Eigen::Index k = 1; k <= i; ++k)
    binom *= static_cast<double>(total + 2 - k) / static_cast<double>(k);
  Eigen::ArrayXd r = grid->points.array();
  Eigen::VectorXd v =
      (binom * r.pow(static_cast<double>(i)) * (1.0 - r).pow(static_cast<double>(total + 1 - i)))
          .matrix();
  return {grid, v};
}

std::pair<Eigen::Matrix3d, Eigen::Matrix3d> beta_matrices() {
  Eigen::Matrix3d b1, b2;
  b1 << -0.03, 0.09, 0.15,
        0.11, -0.94, 0.26,
        -0.30, -0.17, 0.21;
  b2 << -0.41, -0.29, -0.28,
        -0.42, -0.26, 0.09,
        -0.73, -0.12, 0.15;
  return {b1, b2};
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> beta_matrices_for(Eigen::Index k) {
  if (k == 3) {
    auto [b1, b2] = beta_matrices();
    return {b1, b2};
  }
  // deterministic full-rank surrogate for other factor counts
  std::pair<Eigen::MatrixXd, Eigen::MatrixXd> out;
  for (int which = 0; which < 2; ++which) {
    Eigen::MatrixXd b(k, k);
    for (std::uint64_t attempt = 0;; ++attempt) {
      CounterRng rng(0xB7A5ULL + static_cast<std::uint64_t>(which),
                     static_cast<std::uint64_t>(k) * 64 + attempt);
      for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) b(i, j) = rng.next_uniform() - 0.5;
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
      if (svd.singularValues().minCoeff() > 1e-3) break;
    }
    (which == 0 ? out.first : out.second) = b;
  }
  return out;
}

DGPData gen_dgp(const DGPConfig& config) {
  const Eigen::Index t = config.T;
  const Eigen::Index k = config.K;
  const Eigen::Index i_count = config.I > 0 ? config.I : 2 * k;
  if (k < 1) throw std::invalid_argument("gen_dgp: K must be positive");
  GridPtr grid = make_uniform_grid(0.0, 1.0, config.P);

  Eigen::MatrixXd basis(config.P, 3 * k);
  for (Eigen::Index l = 1; l <= 3 * k; ++l) basis.col(l - 1) = fourier_basis(l, grid).values;
  Eigen::MatrixXd rho(i_count, config.P);
  for (Eigen::Index i = 1; i <= i_count; ++i)
    rho.row(i - 1) = bernstein_basis(i, i_count, grid).values.transpose();

  CounterRng rng(config.seed, config.stream);
  auto draw_matrix = [&rng](Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.next_normal();
    return m;
  };

  DGPData data;
  auto [b1, b2] = beta_matrices_for(k);
  if (config.null_beta1) b1.setZero();

  Eigen::MatrixXd f1 = draw_matrix(t, k);
  Eigen::MatrixXd e1 = draw_matrix(t, 2 * k);
  Eigen::MatrixXd f2 = draw_matrix(t, k);
  Eigen::MatrixXd e2 = draw_matrix(t, 2 * k);
  Eigen::MatrixXd u = draw_matrix(t, i_count);
  if (config.variant == DGPVariant::heteroskedastic)
    u = f1.col(0).asDiagonal() * u;  // u_it ~ N(0, f_1t^2)

  data.x1 = {grid, f1 * basis.leftCols(k).transpose() +
                       e1 * basis.rightCols(2 * k).transpose()};
  data.x2 = {grid, f2 * basis.leftCols(k).transpose() +
                       e2 * basis.rightCols(2 * k).transpose()};
  // exact integral term: int beta_j(r,s) X_jt(s) ds = V(r)' B_j F_jt
  data.y = {grid, f1 * b1.transpose() * basis.leftCols(k).transpose() +
                      f2 * b2.transpose() * basis.leftCols(k).transpose() + u * rho};
  data.beta1_true = {grid, grid, basis.leftCols(k) * b1 * basis.leftCols(k).transpose()};
  data.beta2_true = {grid, grid, basis.leftCols(k) * b2 * basis.leftCols(k).transpose()};
  data.factors1 = std::move(f1);
  data.factors2 = std::move(f2);
  return data;
}

namespace {

// Fixed-size replication blocks processed by a worker pool; blocks are
// reduced in index order so results do not depend on the thread count.
template <typename Block, typename Work>
std::vector<Block> run_blocks(Eigen::Index reps, int n_workers, Work&& work) {
  const Eigen::Index n_blocks = std::min<Eigen::Index>(reps, 64);
  std::vector<Block> blocks(static_cast<std::size_t>(n_blocks));
  if (n_workers <= 0) {
    unsigned hw = std::thread::hardware_concurrency();
    n_workers = hw > 0 ? static_cast<int>(hw) : 1;
  }
  std::atomic<Eigen::Index> next{0};
  auto runner = [&]() {
    for (;;) {
      Eigen::Index b = next.fetch_add(1);
      if (b >= n_blocks) return;
      Eigen::Index lo = b * reps / n_blocks;
      Eigen::Index hi = (b + 1) * reps / n_blocks;
      for (Eigen::Index rep = lo; rep < hi; ++rep)
        work(rep, blocks[static_cast<std::size_t>(b)]);
    }
  };
  if (n_workers == 1) {
    runner();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(runner);
    for (auto& th : pool) th.join();
  }
  return blocks;
}

struct TrueParamFit {
  FFRFit fit;
};

// Regression on the known factors with the known loadings, the reference
// estimator with no first-stage error.
FFRFit fit_with_known_factors(const DGPData& data, Eigen::Index k) {
  ModelSpec spec;
  spec.regressors = {{"x1", 0, k}, {"x2", 0, k}};
  const Eigen::Index t = data.y.rows();
  Eigen::MatrixXd design(t, 1 + 2 * k);
  design.col(0).setOnes();
  design.middleCols(1, k) = data.factors1;
  design.middleCols(1 + k, k) = data.factors2;
  FFRFit fit = fit_ffr(data.y, design, spec);
  for (int j = 0; j < 2; ++j) {
    FactorModel fm;
    fm.regressor_id = j == 0 ? "x1" : "x2";
    fm.K = k;
    fm.mean = {data.y.grid, Eigen::VectorXd::Zero(data.y.grid->size())};
    fm.eigenvalues = Eigen::VectorXd::LinSpaced(k, static_cast<double>(k), 1.0);
    for (Eigen::Index l = 1; l <= k; ++l) fm.loadings.push_back(fourier_basis(l, data.y.grid));
    fm.scores = j == 0 ? data.factors1 : data.factors2;
    fit.factor_models.push_back(std::move(fm));
  }
  fit.x_panels = {data.x1, data.x2};
  return fit;
}

double coverage_share(const Kernel& beta_hat, const Kernel& beta_true, const Kernel& omega,
                      Eigen::Index t, double z) {
  Eigen::ArrayXXd half =
      z * (omega.values.array().max(0.0) / static_cast<double>(t)).sqrt();
  return ((beta_hat.values - beta_true.values).array().abs() <= half).cast<double>().mean();
}

}  // namespace

SimulationReport run_monte_carlo(Eigen::Index reps, const std::vector<Eigen::Index>& t_list,
                                 DGPVariant variant, std::uint64_t seed, Eigen::Index p,
                                 int n_workers) {
  if (reps < 1) throw std::invalid_argument("run_monte_carlo: need at least one replication");
  const auto start = std::chrono::steady_clock::now();
  const Eigen::Index k = 3;
  const double z95 = normal_quantile(0.975);

  SimulationReport report;
  report.variant = variant;
  report.reps = reps;
  report.seed = seed;

  struct Block {
    Eigen::MatrixXd err_true, err_ffr;
    double cov_true = 0.0, cov_unc = 0.0, cov_ffr = 0.0;
    Eigen::Index n = 0;
  };

  for (std::size_t ti = 0; ti < t_list.size(); ++ti) {
    const Eigen::Index t = t_list[ti];
    auto work = [&](Eigen::Index rep, Block& blk) {
      DGPConfig cfg;
      cfg.T = t;
      cfg.K = k;
      cfg.variant = variant;
      cfg.seed = seed;
      cfg.P = p;
      cfg.stream = static_cast<std::uint64_t>(rep) + (static_cast<std::uint64_t>(ti) << 32);
      DGPData data = gen_dgp(cfg);
      if (blk.n == 0) {
        blk.err_true = Eigen::MatrixXd::Zero(p, p);
        blk.err_ffr = Eigen::MatrixXd::Zero(p, p);
      }

      // reference: known factors and loadings
      FFRFit fit_true = fit_with_known_factors(data, k);
      Kernel beta_true_hat = coefficient_surface(fit_true, 0);
      Kernel om_true = covariance_surface(fit_true, data.y, 0, /*corrected=*/false);
      blk.err_true += beta_true_hat.values - data.beta1_true.values;
      blk.cov_true += coverage_share(beta_true_hat, data.beta1_true, om_true, t, z95);

      // feasible estimator with generated regressors
      ModelSpec spec;
      spec.regressors = {{"x1", 0, k}, {"x2", 0, k}};
      Eigen::MatrixXd w = Eigen::MatrixXd::Ones(t, 1);
      FFRFit fit = fit_ffr_model(spec, data.y, w, {data.x1, data.x2});
      Kernel beta_hat = coefficient_surface(fit, 0);
      Kernel om_unc = covariance_surface(fit, data.y, 0, /*corrected=*/false);
      Kernel om_ffr = covariance_surface(fit, data.y, 0, /*corrected=*/true);
      blk.err_ffr += beta_hat.values - data.beta1_true.values;
      blk.cov_unc += coverage_share(beta_hat, data.beta1_true, om_unc, t, z95);
      blk.cov_ffr += coverage_share(beta_hat, data.beta1_true, om_ffr, t, z95);
      ++blk.n;
    };
    auto blocks = run_blocks<Block>(reps, n_workers, work);

    Eigen::MatrixXd err_true = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd err_ffr = Eigen::MatrixXd::Zero(p, p);
    SimulationCell cell;
    cell.T = t;
    for (const auto& blk : blocks) {
      if (blk.n == 0) continue;
      err_true += blk.err_true;
      err_ffr += blk.err_ffr;
      cell.coverage_true_param += blk.cov_true;
      cell.coverage_uncorrected += blk.cov_unc;
      cell.coverage_ffr += blk.cov_ffr;
    }
    const double n = static_cast<double>(reps);
    // signed estimation error averaged over grid and replications; pointwise
    // errors of opposite sign cancel, matching the reported bias aggregates
    cell.bias_true_param = std::abs((err_true / n).mean());
    cell.bias_ffr = std::abs((err_ffr / n).mean());
    cell.coverage_true_param /= n;
    cell.coverage_uncorrected /= n;
    cell.coverage_ffr /= n;
    report.cells.push_back(cell);
  }

  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<FactorCountCell> run_factor_count_study(Eigen::Index reps,
                                                    const std::vector<Eigen::Index>& t_list,
                                                    const std::vector<Eigen::Index>& k_list,
                                                    double gamma, std::uint64_t seed,
                                                    Eigen::Index p, int n_workers,
                                                    Eigen::Index k_max) {
  if (!(gamma > 0.0)) throw std::invalid_argument("run_factor_count_study: gamma must be positive");
  std::vector<FactorCountCell> cells;
  struct Block {
    Eigen::Index correct = 0;
  };
  std::uint64_t combo = 0;
  for (Eigen::Index k : k_list) {
    for (Eigen::Index t : t_list) {
      ++combo;
      auto work = [&, k, t, combo](Eigen::Index rep, Block& blk) {
        DGPConfig cfg;
        cfg.T = t;
        cfg.K = k;
        cfg.seed = seed;
        cfg.P = p;
        cfg.stream = static_cast<std::uint64_t>(rep) + (combo << 32);
        DGPData data = gen_dgp(cfg);
        EDResult ed = estimate_num_factors(data.x1, data.y, gamma, k_max);
        if (ed.K_hat == k) ++blk.correct;
      };
      auto blocks = run_blocks<Block>(reps, n_workers, work);
      Eigen::Index correct = 0;
      for (const auto& blk : blocks) correct += blk.correct;
      cells.push_back({k, t, static_cast<double>(correct) / static_cast<double>(reps)});
    }
  }
  return cells;
}

double run_size_study(Eigen::Index reps, Eigen::Index t, DGPVariant variant, std::uint64_t seed,
                      Eigen::Index p, double alpha, int n_workers) {
  struct Block {
    double reject = 0.0;
    Eigen::Index n = 0;
  };
  auto work = [&](Eigen::Index rep, Block& blk) {
    DGPConfig cfg;
    cfg.T = t;
    cfg.K = 3;
    cfg.variant = variant;
    cfg.seed = seed;
    cfg.P = p;
    cfg.stream = static_cast<std::uint64_t>(rep);
    cfg.null_beta1 = true;
    DGPData data = gen_dgp(cfg);
    ModelSpec spec;
    spec.regressors = {{"x1", 0, 3}, {"x2", 0, 3}};
    Eigen::MatrixXd w = Eigen::MatrixXd::Ones(t, 1);
    FFRFit fit = fit_ffr_model(spec, data.y, w, {data.x1, data.x2});
    Kernel beta_hat = coefficient_surface(fit, 0);
    Kernel om = covariance_surface(fit, data.y, 0, /*corrected=*/true);
    Kernel pvals = pointwise_pvalues(beta_hat, om, t);
    blk.reject += (pvals.values.array() < alpha).cast<double>().mean();
    ++blk.n;
  };
  auto blocks = run_blocks<Block>(reps, n_workers, work);
  double reject = 0.0;
  for (const auto& blk : blocks) reject += blk.reject;
  return reject / static_cast<double>(reps);
}

}  // namespace ffr
