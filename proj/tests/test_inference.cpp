#include <doctest.h>

#include <cmath>

#include "ffr/errors.hpp"
#include "ffr/inference.hpp"
#include "ffr/rng.hpp"
#include "ffr/simulation.hpp"
#include "ffr/stats.hpp"
#include "omega_oracle.hpp"

using namespace ffr;

namespace {

// Small random instance with genuine factor structure in both regressors.
FFRFit small_fit(Eigen::Index t, Eigen::Index p, std::uint64_t seed, CurvePanel& y_out,
                 Eigen::Index n_reg = 2, Eigen::Index k = 2) {
  DGPConfig cfg;
  cfg.T = t;
  cfg.K = k;
  cfg.P = p;
  cfg.seed = seed;
  DGPData data = gen_dgp(cfg);
  ModelSpec spec;
  spec.regressors.push_back({"x1", 0, k});
  if (n_reg > 1) spec.regressors.push_back({"x2", 0, k});
  Eigen::MatrixXd w = Eigen::MatrixXd::Ones(t, 1);
  std::vector<CurvePanel> xs = {data.x1};
  if (n_reg > 1) xs.push_back(data.x2);
  y_out = data.y;
  return fit_ffr_model(spec, data.y, w, xs);
}

}  // namespace

TEST_CASE("normal CDF matches long-double erfc oracle on [-8, 8]") {
  for (double x = -8.0; x <= 8.0; x += 0.37) {
    long double oracle = 0.5L * erfcl(-static_cast<long double>(x) / std::sqrt(2.0L));
    CHECK(std::abs(normal_cdf(x) - static_cast<double>(oracle)) < 1e-10);
  }
}

TEST_CASE("correction terms: K=1 kills G, noiseless data kills eps") {
  CurvePanel y;
  FFRFit fit = small_fit(30, 12, 51, y, 1, 1);
  CorrectionTerms ct = compute_correction_terms(fit, y, 0);
  for (const auto& g : ct.G_t) CHECK(g.lpNorm<Eigen::Infinity>() == 0.0);

  // noiseless X: build a panel exactly in the span of the fitted loadings
  GridPtr g = make_uniform_grid(0.0, 1.0, 20);
  CounterRng rng(52, 0);
  Curve v1 = fourier_basis(2, g), v2 = fourier_basis(3, g);
  const Eigen::Index t = 40;
  Eigen::MatrixXd xv(t, 20), yv(t, 20);
  for (Eigen::Index i = 0; i < t; ++i) {
    double f1 = rng.next_normal(), f2 = rng.next_normal();
    xv.row(i) = (2.0 * f1 * v1.values + f2 * v2.values).transpose();
    yv.row(i) = ((f1 + f2) * v1.values + (f1 - 0.5 * f2) * v2.values).transpose();
  }
  ModelSpec spec;
  spec.regressors.push_back({"x", 0, 2});
  FFRFit nfit = fit_ffr_model(spec, {g, yv}, Eigen::MatrixXd::Ones(t, 1), {{g, xv}});
  CorrectionTerms nct = compute_correction_terms(nfit, {g, yv}, 0);
  CHECK(nct.eps_panel.values.lpNorm<Eigen::Infinity>() < 1e-8);

  // eps orthogonal to the fitted loadings in the noisy DGP case
  CurvePanel y2;
  FFRFit fit2 = small_fit(40, 16, 53, y2, 2, 2);
  CorrectionTerms ct2 = compute_correction_terms(fit2, y2, 0);
  const FactorModel& fm = fit2.factor_models[0];
  for (Eigen::Index tt = 0; tt < fit2.T(); ++tt)
    for (const Curve& load : fm.loadings)
      CHECK(std::abs(inner_product(ct2.eps_panel.row(tt), load)) < 1e-8);
}

TEST_CASE("correction terms match the literal-formula oracle (T=6, K=2, P=8)") {
  CurvePanel y;
  FFRFit fit = small_fit(6, 8, 60, y, 2, 2);
  CorrectionTerms ct = compute_correction_terms(fit, y, 0);
  ffr_test::OracleTerms o = ffr_test::oracle_terms(fit, y, 0);

  CHECK((ct.gamma_curves - o.gamma).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK((ct.y_scores - o.y_scores).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK((ct.fy_bar - o.fy_bar).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK((ct.h_t - o.h_t).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK((ct.eps_panel.values - o.eps).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK((ct.z_bar - o.z_bar).lpNorm<Eigen::Infinity>() < 1e-10);
  for (Eigen::Index t = 0; t < fit.T(); ++t) {
    CHECK((ct.G_t[static_cast<std::size_t>(t)] - o.G_t[static_cast<std::size_t>(t)])
              .lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK(ct.G_t[static_cast<std::size_t>(t)].diagonal().lpNorm<Eigen::Infinity>() == 0.0);
  }
  for (std::size_t k = 0; k < ct.zF_bar.size(); ++k)
    CHECK((ct.zF_bar[k] - o.zF_bar[k]).lpNorm<Eigen::Infinity>() < 1e-10);

  // numerator symmetry of G
  for (Eigen::Index t = 0; t < fit.T(); ++t) {
    const Eigen::MatrixXd& gt = ct.G_t[static_cast<std::size_t>(t)];
    const Eigen::VectorXd& ev = fit.factor_models[0].eigenvalues;
    CHECK(gt(0, 1) * (ev(0) - ev(1)) ==
          doctest::Approx(gt(1, 0) * (ev(1) - ev(0))).epsilon(1e-10));
  }
}

TEST_CASE("covariance surface equals the quadruple-loop oracle") {
  for (std::uint64_t seed : {70, 71, 72}) {
    CurvePanel y;
    FFRFit fit = small_fit(9, 10, seed, y, 2, 2);
    for (bool corrected : {false, true}) {
      Kernel fast = covariance_surface(fit, y, 0, corrected);
      Eigen::MatrixXd slow = ffr_test::oracle_omega(fit, y, 0, corrected);
      CHECK((fast.values - slow).lpNorm<Eigen::Infinity>() < 1e-10);
    }
    // nonnegativity (mean of squares)
    Kernel om = covariance_surface(fit, y, 0, true);
    CHECK(om.values.minCoeff() >= 0.0);
  }
}

TEST_CASE("covariance surface and p-values are sign-invariant") {
  CurvePanel y;
  FFRFit fit = small_fit(25, 12, 80, y, 2, 2);
  Kernel om = covariance_surface(fit, y, 0, true);
  Kernel beta = coefficient_surface(fit, 0);
  Kernel pv = pointwise_pvalues(beta, om, fit.T());

  // flip the first loading of regressor 0 and rebuild the fit by hand
  FFRFit flipped = fit;
  FactorModel& fm = flipped.factor_models[0];
  fm.loadings[0].values = -fm.loadings[0].values;
  fm.scores.col(0) = -fm.scores.col(0);
  Eigen::Index col = flipped.spec.factor_offset(0);
  flipped.design.col(col) = -flipped.design.col(col);
  flipped.Q_hat.row(col) = -flipped.Q_hat.row(col);
  flipped.Q_hat.col(col) = -flipped.Q_hat.col(col);
  flipped.Q_hat_inv.row(col) = -flipped.Q_hat_inv.row(col);
  flipped.Q_hat_inv.col(col) = -flipped.Q_hat_inv.col(col);
  flipped.B_hat.row(col) = -flipped.B_hat.row(col);

  Kernel om2 = covariance_surface(flipped, y, 0, true);
  Kernel beta2 = coefficient_surface(flipped, 0);
  Kernel pv2 = pointwise_pvalues(beta2, om2, flipped.T());
  CHECK((om.values - om2.values).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((beta.values - beta2.values).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((pv.values - pv2.values).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("confidence bands") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-5));

  GridPtr g = make_uniform_grid(0.0, 1.0, 5);
  Kernel beta{g, g, Eigen::MatrixXd::Random(5, 5)};
  Kernel zero{g, g, Eigen::MatrixXd::Zero(5, 5)};
  auto [lo, hi] = confidence_band(beta, zero, 100, 0.95);
  CHECK((lo.values - beta.values).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((hi.values - beta.values).lpNorm<Eigen::Infinity>() == 0.0);

  Kernel om{g, g, Eigen::MatrixXd::Constant(5, 5, 4.0)};
  auto [lo2, hi2] = confidence_band(beta, om, 100, 0.95);
  double width = hi2.values(2, 2) - lo2.values(2, 2);
  CHECK(width == doctest::Approx(2.0 * normal_quantile(0.975) * std::sqrt(4.0 / 100.0))
                     .epsilon(1e-10));

  CHECK_THROWS_AS(confidence_band(beta, om, 100, 1.5), std::invalid_argument);
}

TEST_CASE("pointwise p-values") {
  GridPtr g = make_uniform_grid(0.0, 1.0, 3);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3, 3);
  Eigen::MatrixXd om = Eigen::MatrixXd::Ones(3, 3);
  Kernel pv = pointwise_pvalues({g, g, b}, {g, g, om}, 100);
  CHECK((pv.values.array() - 1.0).abs().maxCoeff() == 0.0);

  // sqrt(T) beta / sqrt(omega) = 1.959964 -> p = 0.05
  Eigen::MatrixXd b2 = Eigen::MatrixXd::Constant(3, 3, 1.959964 / 10.0);
  Kernel pv2 = pointwise_pvalues({g, g, b2}, {g, g, om}, 100);
  CHECK(pv2.values(1, 1) == doctest::Approx(0.05).epsilon(1e-4));

  // degenerate omega
  Eigen::MatrixXd om0 = Eigen::MatrixXd::Zero(3, 3);
  Eigen::MatrixXd b3 = Eigen::MatrixXd::Zero(3, 3);
  b3(0, 0) = 0.5;
  Kernel pv3 = pointwise_pvalues({g, g, b3}, {g, g, om0}, 100);
  CHECK(pv3.values(0, 0) == 0.0);
  CHECK(pv3.values(1, 1) == 1.0);
}

TEST_CASE("make_inference bundles consistent surfaces") {
  CurvePanel y;
  FFRFit fit = small_fit(30, 12, 90, y, 2, 2);
  InferenceResult inf = make_inference(fit, y, 0, 0.95, true);
  CHECK(inf.omega.values.minCoeff() >= -1e-12);
  CHECK(inf.p_values.values.minCoeff() >= 0.0);
  CHECK(inf.p_values.values.maxCoeff() <= 1.0);
  // se = sqrt(omega / T)
  Eigen::MatrixXd se_direct = (inf.omega.values / static_cast<double>(fit.T())).cwiseSqrt();
  CHECK((inf.se.values - se_direct).lpNorm<Eigen::Infinity>() < 1e-12);
  // band symmetry around beta
  Kernel beta = coefficient_surface(fit, 0);
  CHECK(((inf.ci_upper.values + inf.ci_lower.values) / 2.0 - beta.values)
            .lpNorm<Eigen::Infinity>() < 1e-10);
}
