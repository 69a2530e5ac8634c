#include "ffr/smoothing.hpp"

#include <stdexcept>

#include "ffr/errors.hpp"

namespace ffr {

namespace {

// Index of the knot span containing x, restricted to valid spans
// [degree, n_basis-1] of a clamped knot vector.
Eigen::Index find_span(const std::vector<double>& knots, int degree, Eigen::Index n_basis,
                       double x) {
  if (x >= knots[static_cast<std::size_t>(n_basis)]) return n_basis - 1;
  if (x <= knots[static_cast<std::size_t>(degree)]) return degree;
  Eigen::Index lo = degree, hi = n_basis;
  while (hi - lo > 1) {
    Eigen::Index mid = (lo + hi) / 2;
    if (x < knots[static_cast<std::size_t>(mid)])
      hi = mid;
    else
      lo = mid;
  }
  return lo;
}

}  // namespace

Eigen::MatrixXd BSplineBasis::evaluate_at(const Eigen::VectorXd& points) const {
  const int d = degree;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(points.size(), n_basis);
  std::vector<double> left(static_cast<std::size_t>(d) + 1);
  std::vector<double> right(static_cast<std::size_t>(d) + 1);
  std::vector<double> vals(static_cast<std::size_t>(d) + 1);
  for (Eigen::Index p = 0; p < points.size(); ++p) {
    const double x = points(p);
    const Eigen::Index span = find_span(knots, d, n_basis, x);
    // de Boor triangular scheme for the d+1 nonzero functions on this span
    vals[0] = 1.0;
    for (int j = 1; j <= d; ++j) {
      left[static_cast<std::size_t>(j)] = x - knots[static_cast<std::size_t>(span + 1 - j)];
      right[static_cast<std::size_t>(j)] = knots[static_cast<std::size_t>(span + j)] - x;
      double saved = 0.0;
      for (int k = 0; k < j; ++k) {
        double denom = right[static_cast<std::size_t>(k + 1)] + left[static_cast<std::size_t>(j - k)];
        double tmp = denom != 0.0 ? vals[static_cast<std::size_t>(k)] / denom : 0.0;
        vals[static_cast<std::size_t>(k)] = saved + right[static_cast<std::size_t>(k + 1)] * tmp;
        saved = left[static_cast<std::size_t>(j - k)] * tmp;
      }
      vals[static_cast<std::size_t>(j)] = saved;
    }
    for (int k = 0; k <= d; ++k) out(p, span - d + k) = vals[static_cast<std::size_t>(k)];
  }
  return out;
}

BSplineBasis build_bspline_basis(const GridPtr& grid, int degree, Eigen::Index n_basis) {
  if (degree < 0) throw std::invalid_argument("build_bspline_basis: negative degree");
  if (n_basis < degree + 1)
    throw std::invalid_argument("build_bspline_basis: n_basis must be at least degree+1");
  BSplineBasis basis;
  basis.degree = degree;
  basis.n_basis = n_basis;
  basis.grid = grid;
  const double a = grid->a, b = grid->b;
  const Eigen::Index n_interior = n_basis - degree - 1;
  basis.knots.assign(static_cast<std::size_t>(degree) + 1, a);
  for (Eigen::Index i = 1; i <= n_interior; ++i)
    basis.knots.push_back(a + (b - a) * static_cast<double>(i) /
                                  static_cast<double>(n_interior + 1));
  basis.knots.insert(basis.knots.end(), static_cast<std::size_t>(degree) + 1, b);
  basis.evaluation = basis.evaluate_at(grid->points);
  return basis;
}

CurvePanel smooth_panel(const Eigen::MatrixXd& raw, const Eigen::VectorXd& obs_points,
                        const BSplineBasis& basis, const GridPtr& target) {
  if (raw.cols() != obs_points.size())
    throw std::invalid_argument("smooth_panel: raw columns must match obs_points");
  if (raw.cols() < basis.n_basis)
    throw std::invalid_argument("smooth_panel: need at least n_basis observation points");
  Eigen::MatrixXd design = basis.evaluate_at(obs_points);  // M x n_basis
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < basis.n_basis)
    throw singular_fit_error("smooth_panel: rank-deficient basis evaluation matrix");
  Eigen::MatrixXd coeffs = qr.solve(raw.transpose());  // n_basis x T
  Eigen::MatrixXd target_eval = same_grid(basis.grid, target)
                                    ? basis.evaluation
                                    : basis.evaluate_at(target->points);
  CurvePanel out;
  out.grid = target;
  out.values = (target_eval * coeffs).transpose();
  return out;
}

CurvePanel passthrough_panel(const Eigen::MatrixXd& raw, const GridPtr& grid) {
  if (raw.cols() != grid->size())
    throw std::invalid_argument("passthrough_panel: column count must match grid size");
  return {grid, raw};
}

}  // namespace ffr
