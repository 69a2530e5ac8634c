#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ffr/grid.hpp"
#include "ffr/primitives.hpp"
#include "ffr/regression_spec.hpp"

namespace ffr {

// Fitted functional factor regression. B_hat row m is the coefficient curve
// of design column m over r.
struct FFRFit {
  ModelSpec spec;
  GridPtr response_grid;
  Eigen::MatrixXd design;       // T x M
  Eigen::MatrixXd B_hat;        // M x P
  Eigen::MatrixXd Q_hat;        // M x M
  Eigen::MatrixXd Q_hat_inv;    // M x M
  CurvePanel residuals;         // T x P
  std::vector<FactorModel> factor_models;
  std::vector<CurvePanel> x_panels;  // regressor panels, needed for inference
  double condition_number = 0.0;

  Eigen::Index T() const { return design.rows(); }
  Eigen::Index M() const { return design.cols(); }
  // Coefficient block of functional regressor j (K_j x P).
  Eigen::MatrixXd B_block(Eigen::Index j) const {
    return B_hat.middleRows(spec.factor_offset(j), spec.regressors[static_cast<std::size_t>(j)].K);
  }
  // Rows of Q_hat_inv belonging to regressor j (K_j x M).
  Eigen::MatrixXd Q_inv_block(Eigen::Index j) const {
    return Q_hat_inv.middleRows(spec.factor_offset(j),
                                spec.regressors[static_cast<std::size_t>(j)].K);
  }
};

// z_t = (w_t', F_1t', ..., F_Jt')' stacked in declaration order.
Eigen::MatrixXd assemble_design(const Eigen::MatrixXd& w,
                                const std::vector<FactorModel>& factor_models);

// Least squares of Y_t(r) on the design, all grid points sharing one
// factorization of Q_hat.
FFRFit fit_ffr(const CurvePanel& y, const Eigen::MatrixXd& design, const ModelSpec& spec = {});

// Full pipeline: fit factor models per regressor (K from spec), assemble,
// regress.
FFRFit fit_ffr_model(const ModelSpec& spec, const CurvePanel& y, const Eigen::MatrixXd& w,
                     const std::vector<CurvePanel>& xs);

// beta_j(r,s) = sum_l B_j[l](r) psi_lj(s).
Kernel coefficient_surface(const FFRFit& fit, Eigen::Index j);

// alpha_1(r) = alpha*_1(r) - sum_j int beta_j(r,s) mu_j(s) ds.
Curve reconstruct_intercept(const FFRFit& fit);

Curve predict(const FFRFit& fit, const Eigen::VectorXd& w_new, const std::vector<Curve>& x_new);

}  // namespace ffr
