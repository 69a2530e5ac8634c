#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ffr/grid.hpp"

namespace ffr {

enum class DGPVariant { homoskedastic, heteroskedastic };

struct DGPConfig {
  Eigen::Index T = 100;
  Eigen::Index K = 3;
  DGPVariant variant = DGPVariant::homoskedastic;
  std::uint64_t seed = 1;
  Eigen::Index P = 200;
  Eigen::Index I = 0;  // Bernstein polynomial count, 0 means 2K
  std::uint64_t stream = 0;  // substream id, one per replication
  bool null_beta1 = false;   // size-study variant with beta_1 = 0
};

struct DGPData {
  CurvePanel y;
  CurvePanel x1;
  CurvePanel x2;
  Kernel beta1_true;
  Kernel beta2_true;
  Eigen::MatrixXd factors1;  // T x K, true factors of X1
  Eigen::MatrixXd factors2;  // T x K
};

// Fourier elements on [0,1]: v1 = 1, v_{2z} = sqrt(2) sin(2 z pi s),
// v_{2z+1} = sqrt(2) cos(2 z pi s).
Curve fourier_basis(Eigen::Index l, const GridPtr& grid);

// rho_i(r) = C(I+1, i) r^i (1-r)^{I+1-i}.
Curve bernstein_basis(Eigen::Index i, Eigen::Index total, const GridPtr& grid);

// The two fixed 3x3 coefficient matrices of the simulation design.
std::pair<Eigen::Matrix3d, Eigen::Matrix3d> beta_matrices();

// Deterministic full-rank K x K coefficient matrices for K != 3
// (seeded draw, smallest singular value checked).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> beta_matrices_for(Eigen::Index k);

DGPData gen_dgp(const DGPConfig& config);

struct SimulationCell {
  Eigen::Index T = 0;
  double bias_true_param = 0.0;
  double bias_ffr = 0.0;
  double coverage_true_param = 0.0;
  double coverage_uncorrected = 0.0;
  double coverage_ffr = 0.0;
};

struct SimulationReport {
  DGPVariant variant = DGPVariant::homoskedastic;
  Eigen::Index reps = 0;
  std::uint64_t seed = 0;
  std::vector<SimulationCell> cells;
  double runtime_seconds = 0.0;
};

SimulationReport run_monte_carlo(Eigen::Index reps, const std::vector<Eigen::Index>& t_list,
                                 DGPVariant variant, std::uint64_t seed, Eigen::Index p = 200,
                                 int n_workers = 0);

struct FactorCountCell {
  Eigen::Index K = 0;
  Eigen::Index T = 0;
  double share_correct = 0.0;
};

std::vector<FactorCountCell> run_factor_count_study(Eigen::Index reps,
                                                    const std::vector<Eigen::Index>& t_list,
                                                    const std::vector<Eigen::Index>& k_list,
                                                    double gamma, std::uint64_t seed,
                                                    Eigen::Index p = 200, int n_workers = 0,
                                                    Eigen::Index k_max = 10);

// Null-hypothesis size study: beta1 set to zero in the DGP, grid-average
// rejection rate of the pointwise 5% test on beta1.
double run_size_study(Eigen::Index reps, Eigen::Index t, DGPVariant variant, std::uint64_t seed,
                      Eigen::Index p = 200, double alpha = 0.05, int n_workers = 0);

}  // namespace ffr
