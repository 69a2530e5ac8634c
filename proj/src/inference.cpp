#include "ffr/inference.hpp"

#include <cmath>
#include <stdexcept>

#include "ffr/errors.hpp"
#include "ffr/stats.hpp"

namespace ffr {

namespace {

// Rank-1 expansion of g_t = G_t b_t without materializing the per-t
// matrices: out[l](t,r) = sum_{m != l} coef_lm(t) * B(m,r).
std::vector<Eigen::MatrixXd> apply_G_to_B(const Eigen::MatrixXd& f, const Eigen::MatrixXd& ys,
                                          const Eigen::MatrixXd& fy_bar,
                                          const Eigen::VectorXd& lambdas,
                                          const Eigen::MatrixXd& b) {
  const Eigen::Index t = f.rows();
  const Eigen::Index k = f.cols();
  const Eigen::Index p = b.cols();
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(k),
                                   Eigen::MatrixXd::Zero(t, p));
  for (Eigen::Index l = 0; l < k; ++l) {
    for (Eigen::Index m = 0; m < k; ++m) {
      if (m == l) continue;
      double denom = lambdas(l) - lambdas(m);
      Eigen::VectorXd coef =
          (f.col(m).cwiseProduct(ys.col(l)).array() - fy_bar(l, m) +
           f.col(l).cwiseProduct(ys.col(m)).array() - fy_bar(m, l))
              .matrix() /
          denom;
      out[static_cast<std::size_t>(l)].noalias() += coef * b.row(m);
    }
  }
  return out;
}

struct RegressorTerms {
  Eigen::MatrixXd f;        // T x K scores
  Eigen::VectorXd lambdas;  // K
  Eigen::MatrixXd y_scores; // T x K
  Eigen::MatrixXd fy_bar;   // K x K
  Eigen::MatrixXd h_t;      // T x K
  Eigen::MatrixXd gammas;   // K x P
};

RegressorTerms regressor_terms(const FFRFit& fit, const CurvePanel& y, Eigen::Index j) {
  const FactorModel& fm = fit.factor_models[static_cast<std::size_t>(j)];
  const double t = static_cast<double>(fit.T());
  const double lambda1 = fm.eigenvalues(0);
  for (Eigen::Index l = 0; l < fm.K; ++l)
    for (Eigen::Index m = l + 1; m < fm.K; ++m)
      if (std::abs(fm.eigenvalues(l) - fm.eigenvalues(m)) < 1e-10 * lambda1)
        throw near_degenerate_spectrum_error(
            "inference: eigenvalue gap below 1e-10 * lambda_1 for regressor " +
            fm.regressor_id);

  RegressorTerms rt;
  rt.f = fm.scores;
  rt.lambdas = fm.eigenvalues;
  Eigen::MatrixXd yc = y.values.rowwise() - y.values.colwise().mean();
  rt.gammas = (rt.f.transpose() * yc) / t;                              // K x P
  rt.y_scores = yc * y.grid->weights.asDiagonal() * rt.gammas.transpose();  // T x K
  rt.fy_bar = (rt.y_scores.transpose() * rt.f) / t;                     // (l,m)
  rt.h_t = rt.y_scores * rt.lambdas.cwiseInverse().asDiagonal();
  return rt;
}

Eigen::MatrixXd loading_matrix(const FactorModel& fm) {
  Eigen::MatrixXd psi(fm.mean.grid->size(), fm.K);
  for (Eigen::Index l = 0; l < fm.K; ++l) psi.col(l) = fm.loadings[static_cast<std::size_t>(l)].values;
  return psi;
}

}  // namespace

CorrectionTerms compute_correction_terms(const FFRFit& fit, const CurvePanel& y, Eigen::Index j) {
  if (j < 0 || j >= fit.spec.n_functional())
    throw std::invalid_argument("compute_correction_terms: regressor index out of range");
  const double t = static_cast<double>(fit.T());
  RegressorTerms rt = regressor_terms(fit, y, j);

  CorrectionTerms ct;
  ct.gamma_curves = rt.gammas;
  ct.y_scores = rt.y_scores;
  ct.fy_bar = rt.fy_bar;
  ct.h_t = rt.h_t;
  const FactorModel& fm = fit.factor_models[static_cast<std::size_t>(j)];
  ct.G_t.reserve(static_cast<std::size_t>(fit.T()));
  for (Eigen::Index ti = 0; ti < fit.T(); ++ti) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(fm.K, fm.K);
    for (Eigen::Index l = 0; l < fm.K; ++l)
      for (Eigen::Index m = 0; m < fm.K; ++m) {
        if (l == m) continue;
        g(l, m) = (rt.f(ti, m) * rt.y_scores(ti, l) - rt.fy_bar(l, m) +
                   rt.f(ti, l) * rt.y_scores(ti, m) - rt.fy_bar(m, l)) /
                  (rt.lambdas(l) - rt.lambdas(m));
      }
    ct.G_t.push_back(std::move(g));
  }

  if (fit.x_panels.size() != static_cast<std::size_t>(fit.spec.n_functional()))
    throw std::invalid_argument("compute_correction_terms: fit lacks the regressor panels");
  Eigen::MatrixXd psi = loading_matrix(fm);
  // eps_t = X_t - mu_j - F_t' Psi_j
  Eigen::MatrixXd xc = fit.x_panels[static_cast<std::size_t>(j)].values.rowwise() -
                       fm.mean.values.transpose();
  ct.eps_panel = {fm.mean.grid, xc - fm.scores * psi.transpose()};

  ct.z_bar = fit.design.colwise().mean().transpose();
  for (Eigen::Index k = 0; k < fit.spec.n_functional(); ++k) {
    const FactorModel& fk = fit.factor_models[static_cast<std::size_t>(k)];
    ct.zF_bar.push_back((fit.design.transpose() * fk.scores) / t);
  }
  return ct;
}

Kernel covariance_surface(const FFRFit& fit, const CurvePanel& y, Eigen::Index j,
                          bool corrected) {
  if (j < 0 || j >= fit.spec.n_functional())
    throw std::invalid_argument("covariance_surface: regressor index out of range");
  const Eigen::Index t_n = fit.T();
  const double t = static_cast<double>(t_n);
  const FactorModel& fmj = fit.factor_models[static_cast<std::size_t>(j)];
  const Eigen::Index kj = fmj.K;
  const Eigen::Index p_r = fit.response_grid->size();
  const Eigen::Index p_s = fmj.mean.grid->size();

  Eigen::MatrixXd psi_j = loading_matrix(fmj);           // P_s x K_j
  Eigen::MatrixXd qinv_j = fit.Q_inv_block(j);           // K_j x M
  Eigen::MatrixXd qt = fit.design * qinv_j.transpose();  // T x K_j

  // HC part: C_l(t,r) = ([Qinv]_j z_t)_l * u_t(r)
  std::vector<Eigen::MatrixXd> c(static_cast<std::size_t>(kj));
  for (Eigen::Index l = 0; l < kj; ++l)
    c[static_cast<std::size_t>(l)] = qt.col(l).asDiagonal() * fit.residuals.values;

  Eigen::MatrixXd d_mat;        // T x P_r, coefficient of eps_jt(s)
  Eigen::MatrixXd eps;          // T x P_s
  if (corrected) {
    if (fit.x_panels.size() != static_cast<std::size_t>(fit.spec.n_functional()))
      throw std::invalid_argument("covariance_surface: fit lacks the regressor panels");
    Eigen::VectorXd z_bar = fit.design.colwise().mean().transpose();
    Eigen::VectorXd u1 = qinv_j * z_bar;  // K_j

    // sum over k of F_kt' B_k(r)
    Eigen::MatrixXd s_sum = Eigen::MatrixXd::Zero(t_n, p_r);
    std::vector<RegressorTerms> terms;
    std::vector<std::vector<Eigen::MatrixXd>> g_apply;  // per k: K_k matrices T x P_r
    std::vector<Eigen::MatrixXd> a_blocks;              // per k: K_j x K_k
    for (Eigen::Index k = 0; k < fit.spec.n_functional(); ++k) {
      RegressorTerms rt = regressor_terms(fit, y, k);
      Eigen::MatrixXd bk = fit.B_block(k);
      s_sum.noalias() += rt.f * bk;
      g_apply.push_back(apply_G_to_B(rt.f, rt.y_scores, rt.fy_bar, rt.lambdas, bk));
      a_blocks.push_back(qinv_j * ((fit.design.transpose() * rt.f) / t));
      terms.push_back(std::move(rt));
    }
    for (Eigen::Index l = 0; l < kj; ++l) {
      Eigen::MatrixXd w_l = u1(l) * s_sum;
      for (Eigen::Index k = 0; k < fit.spec.n_functional(); ++k) {
        const Eigen::MatrixXd& a_k = a_blocks[static_cast<std::size_t>(k)];
        for (Eigen::Index lp = 0; lp < a_k.cols(); ++lp)
          w_l.noalias() -= a_k(l, lp) * g_apply[static_cast<std::size_t>(k)][static_cast<std::size_t>(lp)];
      }
      w_l.noalias() += g_apply[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)];
      c[static_cast<std::size_t>(l)].noalias() += w_l;
    }

    d_mat = terms[static_cast<std::size_t>(j)].h_t * fit.B_block(j);  // T x P_r
    Eigen::MatrixXd xc = fit.x_panels[static_cast<std::size_t>(j)].values.rowwise() -
                         fmj.mean.values.transpose();
    eps = xc - fmj.scores * psi_j.transpose();
  }

  // Assemble Omega from the factored representation.
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(p_r, p_s);
  for (Eigen::Index l = 0; l < kj; ++l)
    for (Eigen::Index m = 0; m < kj; ++m) {
      Eigen::VectorXd s_lm =
          (c[static_cast<std::size_t>(l)].cwiseProduct(c[static_cast<std::size_t>(m)]))
              .colwise()
              .sum()
              .transpose();  // P_r
      omega.noalias() += s_lm * (psi_j.col(l).cwiseProduct(psi_j.col(m))).transpose();
    }
  if (corrected) {
    for (Eigen::Index l = 0; l < kj; ++l) {
      Eigen::MatrixXd e_l =
          (c[static_cast<std::size_t>(l)].cwiseProduct(d_mat)).transpose() * eps;  // P_r x P_s
      omega.noalias() += 2.0 * e_l * psi_j.col(l).asDiagonal();
    }
    omega.noalias() += (d_mat.cwiseProduct(d_mat)).transpose() * eps.cwiseProduct(eps);
  }
  omega /= t;
  return {fit.response_grid, fmj.mean.grid, omega};
}

std::pair<Kernel, Kernel> confidence_band(const Kernel& beta, const Kernel& omega, Eigen::Index t,
                                          double level) {
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("confidence_band: level must be in (0,1)");
  double z = normal_quantile(0.5 + level / 2.0);
  Eigen::MatrixXd half =
      z * (omega.values.cwiseMax(0.0) / static_cast<double>(t)).cwiseSqrt();
  return {Kernel{beta.row_grid, beta.col_grid, beta.values - half},
          Kernel{beta.row_grid, beta.col_grid, beta.values + half}};
}

Kernel pointwise_pvalues(const Kernel& beta, const Kernel& omega, Eigen::Index t) {
  Eigen::MatrixXd p(beta.values.rows(), beta.values.cols());
  const double sqrt_t = std::sqrt(static_cast<double>(t));
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index k = 0; k < p.cols(); ++k) {
      double om = std::max(omega.values(i, k), 0.0);
      double b = beta.values(i, k);
      if (om < 1e-300) {
        p(i, k) = b != 0.0 ? 0.0 : 1.0;
      } else {
        double stat = std::abs(sqrt_t * b / std::sqrt(om));
        p(i, k) = 2.0 * (1.0 - normal_cdf(stat));
      }
    }
  return {beta.row_grid, beta.col_grid, p};
}

InferenceResult make_inference(const FFRFit& fit, const CurvePanel& y, Eigen::Index j,
                               double level, bool corrected) {
  InferenceResult res;
  res.level = level;
  Kernel beta = coefficient_surface(fit, j);
  res.omega = covariance_surface(fit, y, j, corrected);
  res.se = {res.omega.row_grid, res.omega.col_grid,
            (res.omega.values.cwiseMax(0.0) / static_cast<double>(fit.T())).cwiseSqrt()};
  auto bands = confidence_band(beta, res.omega, fit.T(), level);
  res.ci_lower = std::move(bands.first);
  res.ci_upper = std::move(bands.second);
  res.p_values = pointwise_pvalues(beta, res.omega, fit.T());
  return res;
}

}  // namespace ffr
