#pragma once

#include <Eigen/Dense>

namespace ffr {

// sign(rho) * max(|rho| - lambda, 0)
double soft_threshold(double rho, double lambda);

struct LassoResult {
  double intercept = 0.0;
  Eigen::VectorXd beta;  // on the original (unstandardized) scale
  bool converged = true;
  int sweeps = 0;
};

// Coordinate descent for (1/2n) ||y - b0 - X b||^2 + lambda ||b||_1.
// Features are standardized internally; warm starts on the standardized
// scale via the optional previous result.
LassoResult lasso_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                      double tol = 1e-7, int max_sweeps = 100000);

// Path + k-fold cross-validated lambda (contiguous folds, warm started).
double lasso_cv_lambda(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int folds,
                       int n_lambda = 50);

}  // namespace ffr
