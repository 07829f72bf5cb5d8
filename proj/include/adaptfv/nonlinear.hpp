#pragma once

#include <vector>

#include <Eigen/Dense>

#include "adaptfv/mesh.hpp"
#include "adaptfv/scheme.hpp"
#include "adaptfv/sparse_linalg.hpp"

namespace adaptfv
{

// Inverse law grad p = -k(|u|) u with k(r) = c + (C - c)/sqrt(1 + r^2), and the
// forward law u = -K(|grad p|) grad p obtained by inverting s = r k(r).
class Nonlinearity
{
public:
  Nonlinearity(double c, double C);

  double lower() const { return c_; }
  double upper() const { return C_; }
  bool is_linear() const { return C_ == c_; }

  double inverse_law(double r) const;
  double inverse_law_derivative(double r) const;
  // r k(r) and its derivative.
  double speed(double r) const;
  double speed_derivative(double r) const;
  // Flux magnitude r with speed(r) = s.
  double flux_magnitude(double s) const;

  double diffusion(double s) const;
  // K'(s)/s, finite at s = 0.
  double diffusion_slope_over_s(double s) const;

private:
  double c_;
  double C_;
};

enum class Linearization
{
  fixed_point,
  newton
};

// Two-point scheme sum_sigma xi_sigma U_sigma = F_K with xi_sigma = K(|z_sigma|)
// and z_sigma the face value of the lifted gradient approximation.
class NonlinearTpfa
{
public:
  NonlinearTpfa(const Mesh &mesh, const AdmissibilityData &adm, Nonlinearity law,
                Eigen::VectorXd f, const ScalarFunction &g = {});

  const Mesh &mesh() const { return *mesh_; }
  const Nonlinearity &law() const { return law_; }
  const Eigen::VectorXd &source() const { return f_; }
  int size() const { return mesh_->num_cells(); }

  // Unit-diffusion two-point fluxes T (p_left - p_right) or T (p_left - g).
  FaceFluxVector linear_fluxes(const CellPotentialVector &p) const;
  // Lifted gradient approximation at every face point.
  std::vector<Vec2> face_gradients(const FaceFluxVector &w) const;
  Eigen::VectorXd coefficients(const CellPotentialVector &p) const;
  FaceFluxVector fluxes(const CellPotentialVector &p) const;
  // sum_sigma xi U n_K.n_sigma - F_K.
  Eigen::VectorXd residual(const CellPotentialVector &p) const;

  // Face flux derivatives d(xi w)_sigma / dP (faces x cells).
  SparseMatrix flux_jacobian(const CellPotentialVector &p) const;
  SparseMatrix jacobian(const CellPotentialVector &p) const;

  // System A P = b whose solution is the next linearization iterate.
  LinearSystem linearize(const CellPotentialVector &previous, Linearization method) const;

  // Linearized face fluxes U^{k-1}(P) about `previous`.
  FaceFluxVector linearized_fluxes(const CellPotentialVector &previous, Linearization method,
                                   const CellPotentialVector &p) const;

  // Cached per-linearization data so that U^{k-1}(P) costs one sparse product.
  struct Linearized
  {
    FaceFluxVector base;   // U^{k-1}(0)
    SparseMatrix slope;    // faces x cells
    LinearSystem system;
  };
  Linearized linearization(const CellPotentialVector &previous, Linearization method) const;
  static FaceFluxVector evaluate(const Linearized &lin, const CellPotentialVector &p);

private:
  const Mesh *mesh_;
  Nonlinearity law_;
  Eigen::VectorXd f_;
  std::vector<double> trans_;
  Eigen::VectorXd dirichlet_;
  // Per cell and local face: 2 x n map from outward unit-diffusion fluxes to
  // the lifted field at the face point.
  std::vector<std::vector<Eigen::Matrix2Xd>> eval_;
  std::vector<int> local_of_left_, local_of_right_;
};

}  // namespace adaptfv
