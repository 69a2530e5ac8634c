#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ffr/grid.hpp"
#include "ffr/regression.hpp"

namespace ffr {

// Ingredients of the generated-regressors correction for one functional
// regressor, plus the shared design moments.
struct CorrectionTerms {
  Eigen::MatrixXd gamma_curves;          // K x P over r
  Eigen::MatrixXd y_scores;              // T x K
  Eigen::MatrixXd fy_bar;                // (l,m) = mean_t f_mt y_lt
  std::vector<Eigen::MatrixXd> G_t;      // per t: K x K, zero diagonal
  Eigen::MatrixXd h_t;                   // T x K, h_lt = y_lt / lambda_l
  CurvePanel eps_panel;                  // T x P_x
  Eigen::VectorXd z_bar;                 // M
  std::vector<Eigen::MatrixXd> zF_bar;   // per regressor k: M x K_k
};

CorrectionTerms compute_correction_terms(const FFRFit& fit, const CurvePanel& y, Eigen::Index j);

// Covariance surface Omega_j(r,s) of the coefficient surface estimator.
// corrected=false drops the generated-regressors correction term and
// reduces to the plain heteroskedasticity-consistent estimator.
Kernel covariance_surface(const FFRFit& fit, const CurvePanel& y, Eigen::Index j,
                          bool corrected = true);

std::pair<Kernel, Kernel> confidence_band(const Kernel& beta, const Kernel& omega, Eigen::Index t,
                                          double level);

Kernel pointwise_pvalues(const Kernel& beta, const Kernel& omega, Eigen::Index t);

struct InferenceResult {
  Kernel omega;
  Kernel se;
  Kernel ci_lower;
  Kernel ci_upper;
  Kernel p_values;
  double level = 0.95;
};

InferenceResult make_inference(const FFRFit& fit, const CurvePanel& y, Eigen::Index j,
                               double level = 0.95, bool corrected = true);

}  // namespace ffr
