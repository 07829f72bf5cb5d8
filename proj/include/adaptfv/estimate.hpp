#pragma once

#include <vector>

#include <Eigen/Dense>

#include "adaptfv/localmat.hpp"
#include "adaptfv/mesh.hpp"
#include "adaptfv/problems.hpp"
#include "adaptfv/reconstruct.hpp"
#include "adaptfv/scheme.hpp"

namespace adaptfv
{

// Per-cell estimators and their root-sum-square totals. `osc` holds the data
// oscillation part; the bound is total().
struct EstimateBreakdown
{
  Eigen::VectorXd sp, lin, alg, rem, osc;
  double total_sp = 0.0, total_lin = 0.0, total_alg = 0.0, total_rem = 0.0, total_osc = 0.0;
  // True when osc is folded into sp cellwise (linear paths) rather than added.
  bool osc_in_sp = true;

  double total() const;
  // Cellwise indicator used for marking.
  Eigen::VectorXd indicator() const;
};

// Sum of per-cell integrals of f by the degree-5 rule, refined near the
// problem's singular point.
Eigen::VectorXd cell_integrals(const Mesh &mesh, const Problem &problem);

// (h_K / pi) |f - mean_K f|_K per cell.
Eigen::VectorXd oscillation(const Mesh &mesh, const Problem &problem);

// Poisson-type estimator with P2 potential reconstruction:
// |k^{-1/2}(u_h + k grad s_h)|_K^2 + osc_K^2 / k_K. `f` holds (f, 1)_K.
EstimateBreakdown estimate_poisson(const Mesh &mesh, const GlobalSubmesh &gsm, const RT0Field &u,
                                   const P2Potential &s, const Eigen::VectorXd &f,
                                   const Eigen::VectorXd &osc, const std::vector<double> &k);

// Matrix form U^t A U + Z^t S Z + w (2 U^t Z_ext - 2 D |K|^{-1} 1^t M Z), with
// round-off below -1e-12 of the cell energy scale clamped to zero.
double estimate_darcy_matrix(const Eigen::VectorXd &u_ext, const Eigen::VectorXd &z,
                             const Eigen::VectorXd &z_ext, double divergence, double area,
                             const CellLocalMatrices &m, double cross_weight = 1.0);

// Linear Darcy estimator with scalar diffusion; matrices built with weights
// 1/k and k. `divergence` holds sum_sigma U n_K.n_sigma per cell.
EstimateBreakdown estimate_darcy(const Mesh &mesh, const std::vector<CellLocalMatrices> &matrices,
                                 const FaceFluxVector &u, const PointValues &z,
                                 const Eigen::VectorXd &divergence, const Eigen::VectorXd &osc,
                                 const std::vector<double> &k);

struct ComponentFluxes
{
  FaceFluxVector u;
  FaceFluxVector lin;
  FaceFluxVector alg;
  Eigen::VectorXd residual;  // R^{k,i+j} per cell
};

struct EstimatorConfig
{
  double lower = 0.0;  // c
  double upper = 0.0;  // C
  double friedrichs = 1.0;
  double domain_diameter = 0.0;
  bool ignore_oscillation = false;
};

// Component estimators with matrices built for unit diffusion.
EstimateBreakdown estimate_nonlinear(const Mesh &mesh, const std::vector<CellLocalMatrices> &unit,
                                     const ComponentFluxes &flux, const PointValues &z,
                                     const Eigen::VectorXd &osc, const EstimatorConfig &config);

enum class ErrorWeight
{
  inverse_diffusion,  // |k^{-1/2}(u - u_h)|
  lower_bound         // c^{1/2} |u - u_h|
};

// Per-cell energy error of the reconstruction u against the analytic flux.
Eigen::VectorXd exact_energy_error(const Mesh &mesh, const GlobalSubmesh &gsm, const Problem &problem,
                                   const RT0Field &u, ErrorWeight weight);

double root_sum_squares(const Eigen::VectorXd &v);

// Throws ZeroError.
double effectivity(double estimate, double error);

}  // namespace adaptfv
