#include "ffr/primitives.hpp"

#include <cmath>
#include <stdexcept>

#include "ffr/errors.hpp"

namespace ffr {

Curve sample_mean(const CurvePanel& panel) {
  if (panel.rows() < 1) throw std::invalid_argument("sample_mean: empty panel");
  return {panel.grid, panel.values.colwise().mean().transpose()};
}

Kernel cross_cov_kernel(const CurvePanel& x, const CurvePanel& y) {
  if (x.rows() != y.rows())
    throw std::invalid_argument("cross_cov_kernel: panels differ in length T");
  const double t = static_cast<double>(x.rows());
  Eigen::MatrixXd xc = x.values.rowwise() - x.values.colwise().mean();
  Eigen::MatrixXd yc = y.values.rowwise() - y.values.colwise().mean();
  return {x.grid, y.grid, (xc.transpose() * yc) / t};
}

Kernel d_kernel(const Kernel& c) {
  // C diag(w_col) C'
  Eigen::MatrixXd cw = c.values * c.col_grid->weights.asDiagonal();
  return {c.row_grid, c.row_grid, cw * c.values.transpose()};
}

void apply_sign_convention(Curve& v) {
  double mean_ip = (v.grid->weights.array() * v.values.array()).sum();
  if (std::abs(mean_ip) >= 1e-10) {
    if (mean_ip < 0.0) v.values = -v.values;
    return;
  }
  for (Eigen::Index i = 0; i < v.values.size(); ++i) {
    if (std::abs(v.values(i)) > 1e-10) {
      if (v.values(i) < 0.0) v.values = -v.values;
      return;
    }
  }
}

EigenPairs eigen_integral_operator(const Kernel& d, Eigen::Index n) {
  const Eigen::Index p = d.values.rows();
  if (d.values.cols() != p || !same_grid(d.row_grid, d.col_grid))
    throw std::invalid_argument("eigen_integral_operator: kernel is not square");
  if (n > p) throw std::invalid_argument("eigen_integral_operator: n exceeds grid size");
  const double scale = std::max(1.0, d.values.cwiseAbs().maxCoeff());
  if ((d.values - d.values.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("eigen_integral_operator: kernel not symmetric");

  Eigen::VectorXd sqw = d.row_grid->weights.cwiseSqrt();
  Eigen::MatrixXd m = sqw.asDiagonal() * d.values * sqw.asDiagonal();
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigen_integral_operator: eigensolver failed");

  EigenPairs out;
  out.eigenvalues.resize(n);
  out.eigenfunctions.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index l = 0; l < n; ++l) {
    // Eigen sorts ascending; take from the top.
    Eigen::Index src = p - 1 - l;
    out.eigenvalues(l) = solver.eigenvalues()(src);
    Curve v{d.row_grid, solver.eigenvectors().col(src).cwiseQuotient(sqw)};
    double nrm = l2_norm(v);
    if (nrm > 0.0) v.values /= nrm;
    apply_sign_convention(v);
    out.eigenfunctions.push_back(std::move(v));
  }
  return out;
}

FactorModel fit_factor_model(const CurvePanel& x, const CurvePanel& y, Eigen::Index k,
                             const std::string& regressor_id) {
  if (k < 1) throw std::invalid_argument("fit_factor_model: K must be positive");
  if (x.rows() <= k) throw std::invalid_argument("fit_factor_model: need T > K");
  FactorModel fm;
  fm.regressor_id = regressor_id;
  fm.K = k;
  fm.mean = sample_mean(x);
  Kernel d = d_kernel(cross_cov_kernel(x, y));
  EigenPairs pairs = eigen_integral_operator(d, k);
  fm.eigenvalues = pairs.eigenvalues;
  fm.loadings = std::move(pairs.eigenfunctions);
  const double lambda1 = fm.eigenvalues(0);
  if (fm.eigenvalues(k - 1) < 1e-12 * lambda1)
    throw degenerate_factor_error(
        "fit_factor_model: requested K exceeds the numerically positive spectrum of D (id=" +
        regressor_id + ")");
  for (Eigen::Index l = 0; l + 1 < k; ++l)
    if (fm.eigenvalues(l) - fm.eigenvalues(l + 1) < 1e-8 * lambda1) fm.near_degenerate_gap = true;

  Eigen::MatrixXd xc = x.values.rowwise() - fm.mean.values.transpose();
  Eigen::MatrixXd psi(x.grid->size(), k);
  for (Eigen::Index l = 0; l < k; ++l) psi.col(l) = fm.loadings[static_cast<std::size_t>(l)].values;
  fm.scores = xc * x.grid->weights.asDiagonal() * psi;  // T x K
  return fm;
}

}  // namespace ffr
