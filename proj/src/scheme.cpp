#include "adaptfv/scheme.hpp"

#include <cmath>
#include <string>

#include "adaptfv/errors.hpp"

namespace adaptfv
{

Eigen::VectorXd cell_exterior(const Mesh &mesh, int K, const FaceFluxVector &u)
{
  const int n = mesh.num_cell_faces(K);
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; i++)
  {
    out[i] = mesh.face_signs[K][i] * u[mesh.cell_faces[K][i]];
  }
  return out;
}

Eigen::VectorXd flux_divergence(const Mesh &mesh, const FaceFluxVector &u)
{
  Eigen::VectorXd d(mesh.num_cells());
  for (int K = 0; K < mesh.num_cells(); K++)
  {
    d[K] = cell_exterior(mesh, K, u).sum();
  }
  return d;
}

SparseMatrix divergence_operator(const Mesh &mesh)
{
  std::vector<Eigen::Triplet<double>> t;
  for (int K = 0; K < mesh.num_cells(); K++)
  {
    for (int i = 0; i < mesh.num_cell_faces(K); i++)
    {
      t.emplace_back(K, mesh.cell_faces[K][i], mesh.face_signs[K][i]);
    }
  }
  SparseMatrix d(mesh.num_cells(), mesh.num_faces());
  d.setFromTriplets(t.begin(), t.end());
  return d;
}

Eigen::VectorXd boundary_face_values(const Mesh &mesh, const std::vector<Vec2> &points,
                                     const ScalarFunction &g)
{
  Eigen::VectorXd v = Eigen::VectorXd::Zero(mesh.num_faces());
  if (!g)
  {
    return v;
  }
  for (int f = 0; f < mesh.num_faces(); f++)
  {
    if (mesh.faces[f].boundary())
    {
      v[f] = g(points.empty() ? mesh.faces[f].midpoint : points[f]);
    }
  }
  return v;
}

TpfaOperator make_tpfa(const Mesh &mesh, const AdmissibilityData &adm, const std::vector<double> &k,
                       const ScalarFunction &g)
{
  TpfaOperator op;
  op.transmissibility.resize(mesh.num_faces());
  for (int f = 0; f < mesh.num_faces(); f++)
  {
    const Face &F = mesh.faces[f];
    const double kl = k.empty() ? 1.0 : k[F.left];
    double kf = kl;
    if (!F.boundary())
    {
      const double kr = k.empty() ? 1.0 : k[F.right];
      kf = 2.0 * kl * kr / (kl + kr);
    }
    op.transmissibility[f] = kf * F.length / adm.distance[f];
  }
  op.dirichlet = boundary_face_values(mesh, adm.boundary_points, g);
  return op;
}

TpfaOperator make_tpfa(const Mesh &mesh, const AdmissibilityData &adm,
                       const std::vector<Eigen::Matrix2d> &k, const ScalarFunction &g)
{
  std::vector<double> scalar(k.size());
  for (std::size_t K = 0; K < k.size(); K++)
  {
    const Eigen::Matrix2d &m = k[K];
    const double s = 0.5 * (m(0, 0) + m(1, 1));
    if (std::abs(m(0, 1)) > 1e-12 * std::abs(s) || std::abs(m(1, 0)) > 1e-12 * std::abs(s) ||
        std::abs(m(0, 0) - m(1, 1)) > 1e-12 * std::abs(s))
    {
      throw Error(ErrorCode::TensorNotSupported,
                  "cell " + std::to_string(K) + " has an anisotropic diffusion tensor");
    }
    scalar[K] = s;
  }
  return make_tpfa(mesh, adm, scalar, g);
}

LinearSystem assemble_tpfa(const Mesh &mesh, const TpfaOperator &op, const Eigen::VectorXd &f)
{
  std::vector<Eigen::Triplet<double>> t;
  LinearSystem sys;
  sys.rhs = f;
  for (int e = 0; e < mesh.num_faces(); e++)
  {
    const Face &F = mesh.faces[e];
    const double tr = op.transmissibility[e];
    t.emplace_back(F.left, F.left, tr);
    if (F.boundary())
    {
      sys.rhs[F.left] += tr * op.dirichlet[e];
    }
    else
    {
      t.emplace_back(F.right, F.right, tr);
      t.emplace_back(F.left, F.right, -tr);
      t.emplace_back(F.right, F.left, -tr);
    }
  }
  sys.matrix.resize(mesh.num_cells(), mesh.num_cells());
  sys.matrix.setFromTriplets(t.begin(), t.end());
  return sys;
}

FaceFluxVector tpfa_fluxes(const Mesh &mesh, const TpfaOperator &op, const CellPotentialVector &p)
{
  FaceFluxVector u(mesh.num_faces());
  for (int e = 0; e < mesh.num_faces(); e++)
  {
    const Face &F = mesh.faces[e];
    const double other = F.boundary() ? op.dirichlet[e] : p[F.right];
    u[e] = op.transmissibility[e] * (p[F.left] - other);
  }
  return u;
}

HmfeSystem assemble_hmfe(const Mesh &mesh, const std::vector<Eigen::MatrixXd> &element_matrices,
                         const Eigen::VectorXd &f, const ScalarFunction &g)
{
  const int nc = mesh.num_cells();
  HmfeSystem out;
  out.f = f;
  out.dirichlet = boundary_face_values(mesh, {}, g);
  out.free_index.assign(mesh.num_faces(), -1);
  int nfree = 0;
  for (int e = 0; e < mesh.num_faces(); e++)
  {
    if (!mesh.faces[e].boundary())
    {
      out.free_index[e] = nfree++;
    }
  }
  out.inverse.resize(nc);
  out.a.resize(nc);
  out.alpha.resize(nc);
  std::vector<Eigen::Triplet<double>> t;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nfree);
  for (int K = 0; K < nc; K++)
  {
    const Eigen::MatrixXd &a = element_matrices[K];
    const int n = mesh.num_cell_faces(K);
    if (a.rows() != n || a.cols() != n)
    {
      throw Error(ErrorCode::InvalidInput, "element matrix of cell " + std::to_string(K) + " has wrong size");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success)
    {
      throw Error(ErrorCode::SingularElementMatrix,
                  "element matrix of cell " + std::to_string(K) + " is not positive definite");
    }
    out.inverse[K] = llt.solve(Eigen::MatrixXd::Identity(n, n));
    out.a[K] = out.inverse[K].rowwise().sum();
    out.alpha[K] = out.a[K].sum();
    const Eigen::MatrixXd h = out.inverse[K] - out.a[K] * out.a[K].transpose() / out.alpha[K];
    for (int i = 0; i < n; i++)
    {
      const int gi = out.free_index[mesh.cell_faces[K][i]];
      if (gi < 0)
      {
        continue;
      }
      rhs[gi] += out.a[K][i] * f[K] / out.alpha[K];
      for (int j = 0; j < n; j++)
      {
        const int fj = mesh.cell_faces[K][j];
        const int gj = out.free_index[fj];
        if (gj < 0)
        {
          rhs[gi] -= h(i, j) * out.dirichlet[fj];
        }
        else
        {
          t.emplace_back(gi, gj, h(i, j));
        }
      }
    }
  }
  out.system.matrix.resize(nfree, nfree);
  out.system.matrix.setFromTriplets(t.begin(), t.end());
  out.system.rhs = rhs;
  return out;
}

HmfeSolution hmfe_recover(const Mesh &mesh, const HmfeSystem &sys, const Eigen::VectorXd &free_values)
{
  HmfeSolution sol;
  sol.multipliers = sys.dirichlet;
  for (int e = 0; e < mesh.num_faces(); e++)
  {
    if (sys.free_index[e] >= 0)
    {
      sol.multipliers[e] = free_values[sys.free_index[e]];
    }
  }
  sol.p.resize(mesh.num_cells());
  sol.u = Eigen::VectorXd::Zero(mesh.num_faces());
  for (int K = 0; K < mesh.num_cells(); K++)
  {
    const int n = mesh.num_cell_faces(K);
    Eigen::VectorXd lam(n);
    for (int i = 0; i < n; i++)
    {
      lam[i] = sol.multipliers[mesh.cell_faces[K][i]];
    }
    sol.p[K] = (sys.f[K] + sys.a[K].dot(lam)) / sys.alpha[K];
    const Eigen::VectorXd u = sys.a[K] * sol.p[K] - sys.inverse[K] * lam;
    for (int i = 0; i < n; i++)
    {
      if (mesh.face_signs[K][i] > 0)
      {
        sol.u[mesh.cell_faces[K][i]] = u[i];
      }
    }
  }
  return sol;
}

Eigen::VectorXd hmfe_cell_multipliers(const Mesh &mesh, int K, const Eigen::MatrixXd &element_matrix,
                                      const HmfeSolution &sol)
{
  const Eigen::VectorXd u = cell_exterior(mesh, K, sol.u);
  return Eigen::VectorXd::Constant(u.size(), sol.p[K]) - element_matrix * u;
}

SaddleSolution solve_saddle_dense(const Mesh &mesh, const std::vector<Eigen::MatrixXd> &element_matrices,
                                  const Eigen::VectorXd &f, const ScalarFunction &g)
{
  const int nf = mesh.num_faces(), nc = mesh.num_cells();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nf + nc, nf + nc);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf + nc);
  const Eigen::VectorXd gv = boundary_face_values(mesh, {}, g);
  for (int K = 0; K < nc; K++)
  {
    const int n = mesh.num_cell_faces(K);
    for (int i = 0; i < n; i++)
    {
      const int fi = mesh.cell_faces[K][i];
      const double si = mesh.face_signs[K][i];
      for (int j = 0; j < n; j++)
      {
        m(fi, mesh.cell_faces[K][j]) += si * mesh.face_signs[K][j] * element_matrices[K](i, j);
      }
      m(nf + K, fi) = -si;
      m(fi, nf + K) = -si;
    }
    rhs[nf + K] = -f[K];
  }
  for (int e = 0; e < nf; e++)
  {
    if (mesh.faces[e].boundary())
    {
      rhs[e] = -gv[e];
    }
  }
  const Eigen::VectorXd x = dense_lu_solve(m, rhs);
  return {x.head(nf), x.tail(nc)};
}

}  // namespace adaptfv
