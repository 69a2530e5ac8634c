#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ffr/grid.hpp"

namespace ffr {

// Predictive factor model of one functional regressor: eigenpairs of the
// operator D = C C* built from the cross-covariance with the response,
// together with the projection scores.
struct FactorModel {
  std::string regressor_id;
  Curve mean;
  Eigen::VectorXd eigenvalues;          // descending, length K
  std::vector<Curve> loadings;          // L2-normalized, sign-fixed
  Eigen::MatrixXd scores;               // T x K
  Eigen::Index K = 0;
  bool near_degenerate_gap = false;     // diagnostic: adjacent eigenvalue gap < 1e-8 * lambda1
};

Curve sample_mean(const CurvePanel& panel);

// c(r,s) = T^-1 sum_t (X_t(r) - mu(r)) (Y_t(s) - Ybar(s)), divisor exactly T.
Kernel cross_cov_kernel(const CurvePanel& x, const CurvePanel& y);

// d(r,s) = int c(r,q) c(s,q) dq, quadrature over the column grid of c.
Kernel d_kernel(const Kernel& c);

struct EigenPairs {
  Eigen::VectorXd eigenvalues;      // descending
  std::vector<Curve> eigenfunctions;
};

// Discretized eigenproblem of a symmetric kernel: eigendecompose
// W^{1/2} D W^{1/2}, map eigenvectors back through W^{-1/2}, renormalize
// in L2 and apply the sign convention (positive mean, fallback first
// nonzero coordinate positive).
EigenPairs eigen_integral_operator(const Kernel& d, Eigen::Index n);

void apply_sign_convention(Curve& v);

FactorModel fit_factor_model(const CurvePanel& x, const CurvePanel& y, Eigen::Index k,
                             const std::string& regressor_id = "");

}  // namespace ffr
