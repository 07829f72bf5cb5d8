#include "adaptfv/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "adaptfv/errors.hpp"
#include "adaptfv/localmat.hpp"
#include "adaptfv/parallel.hpp"

namespace adaptfv
{

Nonlinearity::Nonlinearity(double c, double C) : c_(c), C_(C)
{
  if (!(c > 0.0) || !(C >= c) || !std::isfinite(C))
  {
    throw Error(ErrorCode::InvalidInput, "nonlinearity needs 0 < c <= C");
  }
}

double Nonlinearity::inverse_law(double r) const
{
  return c_ + (C_ - c_) / std::sqrt(1.0 + r * r);
}

double Nonlinearity::inverse_law_derivative(double r) const
{
  const double q = 1.0 + r * r;
  return -(C_ - c_) * r / (q * std::sqrt(q));
}

double Nonlinearity::speed(double r) const
{
  return r * inverse_law(r);
}

double Nonlinearity::speed_derivative(double r) const
{
  const double q = 1.0 + r * r;
  return c_ + (C_ - c_) / (q * std::sqrt(q));
}

double Nonlinearity::flux_magnitude(double s) const
{
  if (!(s > 0.0))
  {
    return 0.0;
  }
  // speed is concave and increasing; Newton from below stays below the root.
  double r = std::max(s / C_, (s - (C_ - c_)) / c_);
  for (int it = 0; it < 200; it++)
  {
    const double step = (s - speed(r)) / speed_derivative(r);
    r += step;
    if (std::abs(step) <= 1e-15 * (1.0 + r))
    {
      break;
    }
  }
  return r;
}

double Nonlinearity::diffusion(double s) const
{
  return 1.0 / inverse_law(flux_magnitude(s));
}

double Nonlinearity::diffusion_slope_over_s(double s) const
{
  const double r = flux_magnitude(s);
  const double q = 1.0 + r * r;
  const double k = inverse_law(r);
  return (C_ - c_) / (q * std::sqrt(q) * speed_derivative(r) * k * k * k);
}

NonlinearTpfa::NonlinearTpfa(const Mesh &mesh, const AdmissibilityData &adm, Nonlinearity law,
                             Eigen::VectorXd f, const ScalarFunction &g)
  : mesh_(&mesh), law_(law), f_(std::move(f))
{
  const TpfaOperator op = make_tpfa(mesh, adm, std::vector<double>{}, g);
  trans_ = op.transmissibility;
  dirichlet_ = op.dirichlet;

  const int nc = mesh.num_cells();
  eval_.resize(nc);
  parallel_for(nc, [&](int K) {
    const Submesh &s = mesh.submeshes[K];
    const int n = s.num_exterior();
    const LocalBlocks blocks = assemble_blocks(s, Eigen::Matrix2d::Identity());
    const Eigen::MatrixXd response = local_response(blocks);
    eval_[K].assign(n, Eigen::Matrix2Xd::Zero(2, n));
    for (int j = 0; j < n; j++)
    {
      const Eigen::VectorXd unit = Eigen::VectorXd::Unit(n, j);
      const Eigen::VectorXd spokes =
          response.rows() > 0 ? Eigen::VectorXd(response.col(j)) : Eigen::VectorXd();
      const auto field = assemble_field(s, unit, spokes);
      for (int i = 0; i < n; i++)
      {
        const int t = s.fan ? i : 0;
        eval_[K][i].col(j) = field[t](mesh.faces[mesh.cell_faces[K][i]].midpoint);
      }
    }
  });

  local_of_left_.assign(mesh.num_faces(), -1);
  local_of_right_.assign(mesh.num_faces(), -1);
  for (int K = 0; K < nc; K++)
  {
    for (int i = 0; i < mesh.num_cell_faces(K); i++)
    {
      const int e = mesh.cell_faces[K][i];
      (mesh.faces[e].left == K ? local_of_left_ : local_of_right_)[e] = i;
    }
  }
}

FaceFluxVector NonlinearTpfa::linear_fluxes(const CellPotentialVector &p) const
{
  FaceFluxVector w(mesh_->num_faces());
  for (int e = 0; e < mesh_->num_faces(); e++)
  {
    const Face &F = mesh_->faces[e];
    w[e] = trans_[e] * (p[F.left] - (F.boundary() ? dirichlet_[e] : p[F.right]));
  }
  return w;
}

std::vector<Vec2> NonlinearTpfa::face_gradients(const FaceFluxVector &w) const
{
  const Mesh &m = *mesh_;
  std::vector<Eigen::VectorXd> ext(m.num_cells());
  for (int K = 0; K < m.num_cells(); K++)
  {
    ext[K] = cell_exterior(m, K, w);
  }
  std::vector<Vec2> z(m.num_faces());
  for (int e = 0; e < m.num_faces(); e++)
  {
    const Face &F = m.faces[e];
    Vec2 v = eval_[F.left][local_of_left_[e]] * ext[F.left];
    if (!F.boundary())
    {
      v = 0.5 * (v + eval_[F.right][local_of_right_[e]] * ext[F.right]);
    }
    z[e] = v;
  }
  return z;
}

Eigen::VectorXd NonlinearTpfa::coefficients(const CellPotentialVector &p) const
{
  const auto z = face_gradients(linear_fluxes(p));
  Eigen::VectorXd xi(z.size());
  for (std::size_t e = 0; e < z.size(); e++)
  {
    xi[e] = law_.diffusion(z[e].norm());
  }
  return xi;
}

FaceFluxVector NonlinearTpfa::fluxes(const CellPotentialVector &p) const
{
  return coefficients(p).cwiseProduct(linear_fluxes(p));
}

Eigen::VectorXd NonlinearTpfa::residual(const CellPotentialVector &p) const
{
  return flux_divergence(*mesh_, fluxes(p)) - f_;
}

SparseMatrix NonlinearTpfa::flux_jacobian(const CellPotentialVector &p) const
{
  const Mesh &m = *mesh_;
  const FaceFluxVector w = linear_fluxes(p);
  const auto z = face_gradients(w);
  std::vector<Eigen::Triplet<double>> t;
  for (int e = 0; e < m.num_faces(); e++)
  {
    const Face &F = m.faces[e];
    const double s = z[e].norm();
    const double xi = law_.diffusion(s);
    std::map<int, double> row;
    // d w_e / dP
    row[F.left] += xi * trans_[e];
    if (!F.boundary())
    {
      row[F.right] -= xi * trans_[e];
    }
    // w_e K'(s)/s z . dz/dP through the liftings of the adjacent cells.
    const Vec2 q = w[e] * law_.diffusion_slope_over_s(s) * z[e];
    const double weight = F.boundary() ? 1.0 : 0.5;
    for (int side = 0; side < (F.boundary() ? 1 : 2); side++)
    {
      const int C = side == 0 ? F.left : F.right;
      const int i = side == 0 ? local_of_left_[e] : local_of_right_[e];
      const Eigen::RowVectorXd dz = q.transpose() * eval_[C][i];
      for (int j = 0; j < m.num_cell_faces(C); j++)
      {
        const int g = m.cell_faces[C][j];
        const double coef = weight * m.face_signs[C][j] * dz[j] * trans_[g];
        const Face &G = m.faces[g];
        row[G.left] += coef;
        if (!G.boundary())
        {
          row[G.right] -= coef;
        }
      }
    }
    for (const auto &[col, v] : row)
    {
      t.emplace_back(e, col, v);
    }
  }
  SparseMatrix jac(m.num_faces(), m.num_cells());
  jac.setFromTriplets(t.begin(), t.end());
  return jac;
}

SparseMatrix NonlinearTpfa::jacobian(const CellPotentialVector &p) const
{
  return SparseMatrix(divergence_operator(*mesh_) * flux_jacobian(p));
}

NonlinearTpfa::Linearized NonlinearTpfa::linearization(const CellPotentialVector &previous,
                                                       Linearization method) const
{
  const Mesh &m = *mesh_;
  Linearized lin;
  if (method == Linearization::fixed_point)
  {
    const Eigen::VectorXd xi = coefficients(previous);
    std::vector<Eigen::Triplet<double>> t;
    lin.base = Eigen::VectorXd::Zero(m.num_faces());
    for (int e = 0; e < m.num_faces(); e++)
    {
      const Face &F = m.faces[e];
      const double a = xi[e] * trans_[e];
      t.emplace_back(e, F.left, a);
      if (F.boundary())
      {
        lin.base[e] = -a * dirichlet_[e];
      }
      else
      {
        t.emplace_back(e, F.right, -a);
      }
    }
    lin.slope.resize(m.num_faces(), m.num_cells());
    lin.slope.setFromTriplets(t.begin(), t.end());
  }
  else
  {
    lin.slope = flux_jacobian(previous);
    lin.base = fluxes(previous) - lin.slope * previous;
  }
  const SparseMatrix d = divergence_operator(m);
  lin.system.matrix = d * lin.slope;
  lin.system.rhs = f_ - d * lin.base;
  return lin;
}

FaceFluxVector NonlinearTpfa::evaluate(const Linearized &lin, const CellPotentialVector &p)
{
  return lin.base + lin.slope * p;
}

LinearSystem NonlinearTpfa::linearize(const CellPotentialVector &previous, Linearization method) const
{
  return linearization(previous, method).system;
}

FaceFluxVector NonlinearTpfa::linearized_fluxes(const CellPotentialVector &previous, Linearization method,
                                                const CellPotentialVector &p) const
{
  return evaluate(linearization(previous, method), p);
}

}  // namespace adaptfv
