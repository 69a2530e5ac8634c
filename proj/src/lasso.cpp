#include "ffr/lasso.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ffr {

double soft_threshold(double rho, double lambda) {
  if (rho > lambda) return rho - lambda;
  if (rho < -lambda) return rho + lambda;
  return 0.0;
}

namespace {

struct Standardized {
  Eigen::MatrixXd x;       // centered/scaled columns (constant columns zeroed)
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;   // 0 for constant columns
  double y_mean = 0.0;
  Eigen::VectorXd yc;
};

Standardized standardize(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  Standardized s;
  const double n = static_cast<double>(x.rows());
  s.mean = x.colwise().mean().transpose();
  s.x = x.rowwise() - s.mean.transpose();
  s.scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double sd = std::sqrt(s.x.col(j).squaredNorm() / n);
    s.scale(j) = sd > 1e-12 ? sd : 0.0;
    if (s.scale(j) > 0.0)
      s.x.col(j) /= s.scale(j);
    else
      s.x.col(j).setZero();
  }
  s.y_mean = y.mean();
  s.yc = y.array() - s.y_mean;
  return s;
}

// Coordinate descent on standardized data; beta is in standardized scale.
bool descend(const Eigen::MatrixXd& x, const Eigen::VectorXd& yc, double lambda,
             Eigen::VectorXd& beta, double tol, int max_sweeps, int& sweeps_out) {
  const double n = static_cast<double>(x.rows());
  Eigen::VectorXd resid = yc - x * beta;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      double old = beta(j);
      // standardized columns have unit second moment
      double rho = x.col(j).dot(resid) / n + old;
      double neu = soft_threshold(rho, lambda);
      if (neu != old) {
        resid.noalias() += x.col(j) * (old - neu);
        beta(j) = neu;
        max_change = std::max(max_change, std::abs(neu - old));
      }
    }
    if (max_change < tol) {
      sweeps_out = sweep + 1;
      return true;
    }
  }
  sweeps_out = max_sweeps;
  return false;
}

LassoResult destandardize(const Standardized& s, const Eigen::VectorXd& beta_std) {
  LassoResult res;
  res.beta.resize(beta_std.size());
  for (Eigen::Index j = 0; j < beta_std.size(); ++j)
    res.beta(j) = s.scale(j) > 0.0 ? beta_std(j) / s.scale(j) : 0.0;
  res.intercept = s.y_mean - s.mean.dot(res.beta);
  return res;
}

}  // namespace

LassoResult lasso_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                      double tol, int max_sweeps) {
  if (x.rows() != y.size()) throw std::invalid_argument("lasso_fit: row count mismatch");
  if (lambda < 0.0) throw std::invalid_argument("lasso_fit: negative lambda");
  Standardized s = standardize(x, y);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
  int sweeps = 0;
  bool ok = descend(s.x, s.yc, lambda, beta, tol, max_sweeps, sweeps);
  LassoResult res = destandardize(s, beta);
  res.converged = ok;
  res.sweeps = sweeps;
  return res;
}

double lasso_cv_lambda(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int folds,
                       int n_lambda) {
  const Eigen::Index n = x.rows();
  if (folds < 2) throw std::invalid_argument("lasso_cv_lambda: need at least 2 folds");
  if (n < folds * 5) throw std::invalid_argument("lasso_cv_lambda: too few rows for the folds");

  Standardized s_full = standardize(x, y);
  double lambda_max = (s_full.x.transpose() * s_full.yc).cwiseAbs().maxCoeff() /
                      static_cast<double>(n);
  if (lambda_max <= 0.0) return 0.0;
  std::vector<double> path;
  for (int i = 0; i < n_lambda; ++i)
    path.push_back(lambda_max *
                   std::pow(1e-4, static_cast<double>(i) / static_cast<double>(n_lambda - 1)));

  std::vector<double> cv_err(static_cast<std::size_t>(n_lambda), 0.0);
  for (int f = 0; f < folds; ++f) {
    Eigen::Index lo = f * n / folds;
    Eigen::Index hi = (f + 1) * n / folds;
    Eigen::Index n_test = hi - lo;
    Eigen::Index n_train = n - n_test;
    Eigen::MatrixXd x_train(n_train, x.cols());
    Eigen::VectorXd y_train(n_train);
    x_train.topRows(lo) = x.topRows(lo);
    y_train.head(lo) = y.head(lo);
    x_train.bottomRows(n - hi) = x.bottomRows(n - hi);
    y_train.tail(n - hi) = y.tail(n - hi);

    Standardized st = standardize(x_train, y_train);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
    for (int i = 0; i < n_lambda; ++i) {
      int sweeps = 0;
      descend(st.x, st.yc, path[static_cast<std::size_t>(i)], beta, 1e-6, 20000, sweeps);
      LassoResult res = destandardize(st, beta);
      Eigen::VectorXd pred = x.middleRows(lo, n_test) * res.beta;
      pred.array() += res.intercept;
      cv_err[static_cast<std::size_t>(i)] +=
          (pred - y.segment(lo, n_test)).squaredNorm() / static_cast<double>(n_test);
    }
  }
  int best = 0;
  for (int i = 1; i < n_lambda; ++i)
    if (cv_err[static_cast<std::size_t>(i)] < cv_err[static_cast<std::size_t>(best)]) best = i;
  return path[static_cast<std::size_t>(best)];
}

}  // namespace ffr
