#include "ffr/regression.hpp"

#include <limits>
#include <sstream>
#include <stdexcept>

#include "ffr/errors.hpp"

namespace ffr {

Eigen::MatrixXd assemble_design(const Eigen::MatrixXd& w,
                                const std::vector<FactorModel>& factor_models) {
  const Eigen::Index t = w.rows();
  Eigen::Index m = w.cols();
  for (const auto& fm : factor_models) {
    if (fm.scores.rows() != t)
      throw std::invalid_argument("assemble_design: score row count differs from w");
    m += fm.K;
  }
  Eigen::MatrixXd design(t, m);
  design.leftCols(w.cols()) = w;
  Eigen::Index off = w.cols();
  for (const auto& fm : factor_models) {
    design.middleCols(off, fm.K) = fm.scores;
    off += fm.K;
  }
  return design;
}

FFRFit fit_ffr(const CurvePanel& y, const Eigen::MatrixXd& design, const ModelSpec& spec) {
  const Eigen::Index t = design.rows();
  const Eigen::Index m = design.cols();
  if (y.rows() != t) throw std::invalid_argument("fit_ffr: panel and design row counts differ");
  if (t <= m) throw std::invalid_argument("fit_ffr: need T > M");

  FFRFit fit;
  fit.spec = spec;
  fit.response_grid = y.grid;
  fit.design = design;
  fit.Q_hat = (design.transpose() * design) / static_cast<double>(t);
  fit.Q_hat = 0.5 * (fit.Q_hat + fit.Q_hat.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fit.Q_hat);
  const double lmax = es.eigenvalues().maxCoeff();
  const double lmin = es.eigenvalues().minCoeff();
  fit.condition_number = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (lmin <= 0.0 || fit.condition_number > 1e12) {
    // name the columns loading on the smallest eigenvalue direction
    Eigen::VectorXd dir = es.eigenvectors().col(0).cwiseAbs();
    std::ostringstream msg;
    msg << "fit_ffr: design covariance ill-conditioned (cond=" << fit.condition_number
        << "), offending columns:";
    for (Eigen::Index i = 0; i < m; ++i)
      if (dir(i) > 0.3) msg << " " << i;
    throw multicollinearity_error(msg.str());
  }
  fit.Q_hat_inv =
      es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();

  // One SPD factorization, P right-hand sides.
  Eigen::LLT<Eigen::MatrixXd> llt(fit.Q_hat);
  Eigen::MatrixXd rhs = (design.transpose() * y.values) / static_cast<double>(t);  // M x P
  fit.B_hat = llt.solve(rhs);
  fit.residuals = {y.grid, y.values - design * fit.B_hat};
  return fit;
}

FFRFit fit_ffr_model(const ModelSpec& spec, const CurvePanel& y, const Eigen::MatrixXd& w,
                     const std::vector<CurvePanel>& xs) {
  if (xs.size() != spec.regressors.size())
    throw std::invalid_argument("fit_ffr_model: panel count differs from spec");
  std::vector<FactorModel> fms;
  fms.reserve(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j)
    fms.push_back(fit_factor_model(xs[j], y, spec.regressors[j].K, spec.regressors[j].id));
  FFRFit fit = fit_ffr(y, assemble_design(w, fms), spec);
  fit.factor_models = std::move(fms);
  fit.x_panels = xs;
  return fit;
}

Kernel coefficient_surface(const FFRFit& fit, Eigen::Index j) {
  if (j < 0 || j >= fit.spec.n_functional())
    throw std::invalid_argument("coefficient_surface: regressor index out of range");
  const FactorModel& fm = fit.factor_models[static_cast<std::size_t>(j)];
  Eigen::MatrixXd bj = fit.B_block(j);  // K x P over r
  Eigen::MatrixXd psi(fm.mean.grid->size(), fm.K);
  for (Eigen::Index l = 0; l < fm.K; ++l) psi.col(l) = fm.loadings[static_cast<std::size_t>(l)].values;
  return {fit.response_grid, fm.mean.grid, bj.transpose() * psi.transpose()};
}

Curve reconstruct_intercept(const FFRFit& fit) {
  Eigen::VectorXd alpha = fit.B_hat.row(0).transpose();
  for (Eigen::Index j = 0; j < fit.spec.n_functional(); ++j) {
    const FactorModel& fm = fit.factor_models[static_cast<std::size_t>(j)];
    Eigen::VectorXd mu_proj(fm.K);
    for (Eigen::Index l = 0; l < fm.K; ++l)
      mu_proj(l) = inner_product(fm.loadings[static_cast<std::size_t>(l)], fm.mean);
    alpha -= fit.B_block(j).transpose() * mu_proj;
  }
  return {fit.response_grid, alpha};
}

Curve predict(const FFRFit& fit, const Eigen::VectorXd& w_new, const std::vector<Curve>& x_new) {
  if (w_new.size() != fit.spec.n_scalar())
    throw std::invalid_argument("predict: scalar covariate size mismatch");
  if (static_cast<Eigen::Index>(x_new.size()) != fit.spec.n_functional())
    throw std::invalid_argument("predict: functional regressor count mismatch");
  Eigen::VectorXd z(fit.M());
  z.head(w_new.size()) = w_new;
  Eigen::Index off = w_new.size();
  for (Eigen::Index j = 0; j < fit.spec.n_functional(); ++j) {
    const FactorModel& fm = fit.factor_models[static_cast<std::size_t>(j)];
    const Curve& x = x_new[static_cast<std::size_t>(j)];
    if (!same_grid(x.grid, fm.mean.grid))
      throw std::invalid_argument("predict: curve grid does not match regressor grid");
    Curve centered{x.grid, x.values - fm.mean.values};
    for (Eigen::Index l = 0; l < fm.K; ++l)
      z(off + l) = inner_product(centered, fm.loadings[static_cast<std::size_t>(l)]);
    off += fm.K;
  }
  return {fit.response_grid, fit.B_hat.transpose() * z};
}

}  // namespace ffr
