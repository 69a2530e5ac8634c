#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ffr/grid.hpp"
#include "ffr/regression_spec.hpp"

namespace ffr {

// Eigenvalue-difference test result. g_sequence has K_max + 2 entries with
// mock endpoints g[0] = 1 and g[K_max+1] = 0.
struct EDResult {
  Eigen::Index K_hat = 0;
  Eigen::VectorXd g_sequence;
  double scale_c = 0.0;
  double gamma = 0.0;
  bool hit_upper_bound = false;
};

// (2/pi) atan(gamma ln(T) lambda / c).
double transform_eigenvalue(double lambda_hat, double scale_c, Eigen::Index t, double gamma);

// Product of the sample standard deviations of the discretized X and Y
// observation vectors (plain Euclidean norms over the grid points).
double ed_scale(const CurvePanel& x, const CurvePanel& y);

EDResult estimate_num_factors(const CurvePanel& x, const CurvePanel& y, double gamma,
                              Eigen::Index k_max);

// Expanding-window cross-validation of gamma: select K on the training
// window, fit, score one-step-ahead integrated squared forecast error
// through the validation window. Ties go to the smaller gamma.
double cross_validate_gamma(const ModelSpec& spec, const CurvePanel& y,
                            const Eigen::MatrixXd& w, const std::vector<CurvePanel>& xs,
                            const std::vector<double>& gamma_grid, double split_fraction,
                            Eigen::Index k_max = 10);

std::vector<double> default_gamma_grid();

}  // namespace ffr
