#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ffr/errors.hpp"
#include "ffr/rng.hpp"
#include "ffr/smoothing.hpp"

using namespace ffr;

namespace {

// Independent recursive Cox-de Boor evaluation over the basis's knot vector.
double cox_de_boor(const std::vector<double>& t, std::size_t i, int k, double x, double right_end) {
  if (k == 0) {
    if (x == right_end) return t[i] < x && x <= t[i + 1] ? 1.0 : 0.0;
    return t[i] <= x && x < t[i + 1] ? 1.0 : 0.0;
  }
  double left = 0.0, right = 0.0;
  double denom_l = t[i + static_cast<std::size_t>(k)] - t[i];
  if (denom_l > 0.0) left = (x - t[i]) / denom_l * cox_de_boor(t, i, k - 1, x, right_end);
  double denom_r = t[i + static_cast<std::size_t>(k) + 1] - t[i + 1];
  if (denom_r > 0.0)
    right = (t[i + static_cast<std::size_t>(k) + 1] - x) / denom_r *
            cox_de_boor(t, i + 1, k - 1, x, right_end);
  return left + right;
}

}  // namespace

TEST_CASE("degree-0 basis gives indicator columns") {
  GridPtr g = make_uniform_grid(0.0, 1.0, 41);
  BSplineBasis basis = build_bspline_basis(g, 0, 4);
  for (Eigen::Index i = 0; i < g->size(); ++i) {
    CHECK(basis.evaluation.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (Eigen::Index j = 0; j < 4; ++j) {
      double v = basis.evaluation(i, j);
      CHECK((v == doctest::Approx(0.0) || v == doctest::Approx(1.0)));
    }
  }
}

TEST_CASE("partition of unity for cubic basis") {
  GridPtr g = make_uniform_grid(0.0, 1.0, 101);
  BSplineBasis basis = build_bspline_basis(g, 3, 10);
  for (Eigen::Index i = 0; i < g->size(); ++i)
    CHECK(basis.evaluation.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cubic basis matches recursive Cox-de Boor oracle") {
  GridPtr g = make_uniform_grid(0.0, 1.0, 50);
  BSplineBasis basis = build_bspline_basis(g, 3, 8);
  // evaluate at every grid point, including interior knots
  for (Eigen::Index i = 0; i < g->size(); ++i) {
    double x = g->points(i);
    for (Eigen::Index j = 0; j < basis.n_basis; ++j) {
      double oracle = cox_de_boor(basis.knots, static_cast<std::size_t>(j), 3, x, g->b);
      CHECK(basis.evaluation(i, j) == doctest::Approx(oracle).epsilon(1e-12));
    }
  }
}

TEST_CASE("basis size precondition") {
  GridPtr g = make_uniform_grid(0.0, 1.0, 30);
  CHECK_THROWS_AS(build_bspline_basis(g, 3, 3), std::invalid_argument);
}

TEST_CASE("smooth_panel reproduces data in the basis span") {
  GridPtr g = make_uniform_grid(0.0, 1.0, 40);
  BSplineBasis basis = build_bspline_basis(g, 3, 9);
  CounterRng rng(3, 0);
  Eigen::MatrixXd coef(5, basis.n_basis);
  for (Eigen::Index i = 0; i < coef.size(); ++i) coef(i / coef.cols(), i % coef.cols()) = rng.next_normal();
  Eigen::MatrixXd raw = coef * basis.evaluation.transpose();
  CurvePanel fitted = smooth_panel(raw, g->points, basis, g);
  CHECK((fitted.values - raw).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("smooth_panel recovers a noiseless sine from 24 samples") {
  GridPtr obs = make_uniform_grid(0.0, 1.0, 24);
  GridPtr target = make_uniform_grid(0.0, 1.0, 101);
  BSplineBasis basis = build_bspline_basis(obs, 3, 12);
  Eigen::MatrixXd raw(1, 24);
  for (Eigen::Index i = 0; i < 24; ++i) raw(0, i) = std::sin(2.0 * std::numbers::pi * obs->points(i));
  CurvePanel fitted = smooth_panel(raw, obs->points, basis, target);
  double max_err = 0.0;
  for (Eigen::Index i = 0; i < target->size(); ++i)
    max_err = std::max(max_err,
                       std::abs(fitted.values(0, i) - std::sin(2.0 * std::numbers::pi * target->points(i))));
  CHECK(max_err < 1e-3);
}

TEST_CASE("n_basis = M interpolates the observations") {
  GridPtr obs = make_uniform_grid(0.0, 1.0, 10);
  BSplineBasis basis = build_bspline_basis(obs, 3, 10);
  CounterRng rng(9, 0);
  Eigen::MatrixXd raw(2, 10);
  for (Eigen::Index i = 0; i < raw.size(); ++i) raw(i / 10, i % 10) = rng.next_normal();
  CurvePanel fitted = smooth_panel(raw, obs->points, basis, obs);
  CHECK((fitted.values - raw).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("smoothing is linear") {
  GridPtr g = make_uniform_grid(0.0, 1.0, 30);
  BSplineBasis basis = build_bspline_basis(g, 3, 7);
  CounterRng rng(5, 0);
  Eigen::MatrixXd a(3, 30), b(3, 30);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    a(i / 30, i % 30) = rng.next_normal();
    b(i / 30, i % 30) = rng.next_normal();
  }
  CurvePanel sa = smooth_panel(a, g->points, basis, g);
  CurvePanel sb = smooth_panel(b, g->points, basis, g);
  CurvePanel sab = smooth_panel(2.0 * a + 3.0 * b, g->points, basis, g);
  CHECK((sab.values - 2.0 * sa.values - 3.0 * sb.values).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("least-squares residual orthogonal to basis columns") {
  GridPtr g = make_uniform_grid(0.0, 1.0, 30);
  BSplineBasis basis = build_bspline_basis(g, 3, 7);
  CounterRng rng(6, 0);
  Eigen::MatrixXd raw(1, 30);
  for (Eigen::Index i = 0; i < 30; ++i) raw(0, i) = rng.next_normal();
  CurvePanel fitted = smooth_panel(raw, g->points, basis, g);
  Eigen::VectorXd resid = raw.row(0).transpose() - fitted.values.row(0).transpose();
  Eigen::VectorXd proj = basis.evaluation.transpose() * resid;
  CHECK(proj.lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("passthrough panel keeps raw values") {
  GridPtr g = make_uniform_grid(0.0, 1.0, 24);
  Eigen::MatrixXd raw = Eigen::MatrixXd::Random(4, 24);
  CurvePanel p = passthrough_panel(raw, g);
  CHECK(p.values == raw);
  CHECK(same_grid(p.grid, g));
}
