#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "adaptfv/mesh.hpp"
#include "adaptfv/sparse_linalg.hpp"

namespace adaptfv
{

using ScalarFunction = std::function<double(const Vec2 &)>;

// One value per face in the global orientation: positive means flow out of the
// face's left cell.
using FaceFluxVector = Eigen::VectorXd;
using CellPotentialVector = Eigen::VectorXd;

// Outward fluxes of cell K in loop order.
Eigen::VectorXd cell_exterior(const Mesh &mesh, int K, const FaceFluxVector &u);

// sum_sigma U_sigma n_K . n_sigma per cell.
Eigen::VectorXd flux_divergence(const Mesh &mesh, const FaceFluxVector &u);

// Cells x faces matrix of n_K . n_sigma.
SparseMatrix divergence_operator(const Mesh &mesh);

// Dirichlet value at each boundary face point (zero if g is empty).
Eigen::VectorXd boundary_face_values(const Mesh &mesh, const std::vector<Vec2> &points,
                                     const ScalarFunction &g);

struct TpfaOperator
{
  std::vector<double> transmissibility;  // k |sigma| / d per face
  Eigen::VectorXd dirichlet;             // per face, boundary faces only
};

// Scalar diffusion per cell; interior faces use the harmonic mean.
TpfaOperator make_tpfa(const Mesh &mesh, const AdmissibilityData &adm,
                       const std::vector<double> &k, const ScalarFunction &g = {});

// Tensor entry point: only scalar multiples of the identity are accepted.
TpfaOperator make_tpfa(const Mesh &mesh, const AdmissibilityData &adm,
                       const std::vector<Eigen::Matrix2d> &k, const ScalarFunction &g = {});

// Row K: sum_sigma U_{K,sigma} = F_K.
LinearSystem assemble_tpfa(const Mesh &mesh, const TpfaOperator &op, const Eigen::VectorXd &f);

FaceFluxVector tpfa_fluxes(const Mesh &mesh, const TpfaOperator &op, const CellPotentialVector &p);

// Hybridized mixed scheme. Per cell, with a = A^{-1} 1 and alpha = 1^t a:
// U = a P - A^{-1} Lambda and P = (F + a^t Lambda) / alpha.
struct HmfeSystem
{
  LinearSystem system;               // SPD in the free multipliers
  std::vector<int> free_index;       // per face, -1 for Dirichlet faces
  Eigen::VectorXd dirichlet;         // per face
  std::vector<Eigen::MatrixXd> inverse;
  std::vector<Eigen::VectorXd> a;
  std::vector<double> alpha;
  Eigen::VectorXd f;
};

HmfeSystem assemble_hmfe(const Mesh &mesh, const std::vector<Eigen::MatrixXd> &element_matrices,
                         const Eigen::VectorXd &f, const ScalarFunction &g = {});

struct HmfeSolution
{
  CellPotentialVector p;
  FaceFluxVector u;
  Eigen::VectorXd multipliers;  // every face, Dirichlet faces included
};

HmfeSolution hmfe_recover(const Mesh &mesh, const HmfeSystem &sys, const Eigen::VectorXd &free_values);

// Multiplier seen from cell K: P_K - (A_K U_K)_sigma.
Eigen::VectorXd hmfe_cell_multipliers(const Mesh &mesh, int K, const Eigen::MatrixXd &element_matrix,
                                      const HmfeSolution &sol);

// Dense saddle-point system [[A, B^t], [B, 0]] in (U, P); reference solver.
struct SaddleSolution
{
  FaceFluxVector u;
  CellPotentialVector p;
};

SaddleSolution solve_saddle_dense(const Mesh &mesh, const std::vector<Eigen::MatrixXd> &element_matrices,
                                  const Eigen::VectorXd &f, const ScalarFunction &g = {});

}  // namespace adaptfv
