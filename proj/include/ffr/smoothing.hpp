#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ffr/grid.hpp"

namespace ffr {

// Clamped B-spline basis with uniform interior knots.
struct BSplineBasis {
  int degree = 3;
  std::vector<double> knots;        // full clamped knot vector
  Eigen::Index n_basis = 0;
  GridPtr grid;                     // grid the evaluation matrix refers to
  Eigen::MatrixXd evaluation;       // P x n_basis

  // Evaluate all basis functions at arbitrary points inside [a,b].
  Eigen::MatrixXd evaluate_at(const Eigen::VectorXd& points) const;
};

BSplineBasis build_bspline_basis(const GridPtr& grid, int degree, Eigen::Index n_basis);

// Per-row least-squares basis fit of raw observations at obs_points,
// evaluated on the target grid.
CurvePanel smooth_panel(const Eigen::MatrixXd& raw, const Eigen::VectorXd& obs_points,
                        const BSplineBasis& basis, const GridPtr& target);

// Identity smoothing: raw columns taken directly as grid values.
CurvePanel passthrough_panel(const Eigen::MatrixXd& raw, const GridPtr& grid);

}  // namespace ffr
