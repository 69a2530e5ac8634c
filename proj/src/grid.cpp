#include "ffr/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace ffr {

bool same_grid(const GridPtr& g1, const GridPtr& g2) {
  if (g1 == g2) return true;
  if (!g1 || !g2) return false;
  return g1->points.size() == g2->points.size() && g1->points == g2->points;
}

GridPtr make_uniform_grid(double a, double b, Eigen::Index p) {
  if (p < 2) throw std::invalid_argument("make_uniform_grid: need at least 2 points");
  if (!(a < b)) throw std::invalid_argument("make_uniform_grid: need a < b");
  auto g = std::make_shared<Grid>();
  g->a = a;
  g->b = b;
  g->points = Eigen::VectorXd::LinSpaced(p, a, b);
  const double h = (b - a) / static_cast<double>(p - 1);
  g->weights = Eigen::VectorXd::Constant(p, h);
  g->weights(0) = h / 2.0;
  g->weights(p - 1) = h / 2.0;
  return g;
}

double inner_product(const Curve& f, const Curve& g) {
  if (!same_grid(f.grid, g.grid))
    throw std::invalid_argument("inner_product: curves on different grids");
  return (f.grid->weights.array() * f.values.array() * g.values.array()).sum();
}

double l2_norm(const Curve& f) { return std::sqrt(inner_product(f, f)); }

Curve apply_kernel(const Kernel& k, const Curve& f) {
  if (!same_grid(k.col_grid, f.grid))
    throw std::invalid_argument("apply_kernel: kernel column grid does not match curve");
  Curve out;
  out.grid = k.row_grid;
  out.values = k.values * (k.col_grid->weights.array() * f.values.array()).matrix();
  return out;
}

}  // namespace ffr
