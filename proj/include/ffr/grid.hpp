#pragma once

#include <Eigen/Dense>
#include <memory>

namespace ffr {

// Discretization of [a,b]: ordered points with quadrature weights.
// Weights are in units of domain length, sum(weights) == b - a.
struct Grid {
  double a = 0.0;
  double b = 1.0;
  Eigen::VectorXd points;
  Eigen::VectorXd weights;

  Eigen::Index size() const { return points.size(); }
};

using GridPtr = std::shared_ptr<const Grid>;

// A function on [a,b] sampled at the grid points.
struct Curve {
  GridPtr grid;
  Eigen::VectorXd values;
};

// T curves sharing one grid, row t = curve at time t.
struct CurvePanel {
  GridPtr grid;
  Eigen::MatrixXd values;  // T x P

  Eigen::Index rows() const { return values.rows(); }
  Curve row(Eigen::Index t) const { return {grid, values.row(t).transpose()}; }
};

// Bivariate kernel k(r,s) sampled on row_grid x col_grid.
struct Kernel {
  GridPtr row_grid;
  GridPtr col_grid;
  Eigen::MatrixXd values;  // P_row x P_col
};

bool same_grid(const GridPtr& g1, const GridPtr& g2);

// Uniform grid with trapezoidal weights: h/2 at the endpoints, h inside.
GridPtr make_uniform_grid(double a, double b, Eigen::Index p);

// Quadrature approximation of the L2 inner product <f,g>.
double inner_product(const Curve& f, const Curve& g);

double l2_norm(const Curve& f);

// (K f)(r) = sum_s weights[s] K(r,s) f(s), the discretized integral operator.
Curve apply_kernel(const Kernel& k, const Curve& f);

}  // namespace ffr
