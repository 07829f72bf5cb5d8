#include "adaptfv/localmat.hpp"

#include <cmath>
#include <string>

#include "adaptfv/errors.hpp"
#include "adaptfv/parallel.hpp"
#include "adaptfv/sparse_linalg.hpp"

namespace adaptfv
{

double signed_area(const Triangle &t)
{
  const Vec2 u = t[1] - t[0], v = t[2] - t[0];
  return 0.5 * (u.x() * v.y() - u.y() * v.x());
}

namespace
{

QuadRule midpoint_rule()
{
  QuadRule q;
  q.points = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
  q.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  q.degree = 2;
  return q;
}

QuadRule seven_point_rule()
{
  const double s = std::sqrt(15.0);
  const double a1 = (9.0 - 2.0 * s) / 21.0, b1 = (6.0 + s) / 21.0;
  const double a2 = (9.0 + 2.0 * s) / 21.0, b2 = (6.0 - s) / 21.0;
  const double w1 = (155.0 + s) / 1200.0, w2 = (155.0 - s) / 1200.0;
  QuadRule q;
  q.points = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, {a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1},
              {a2, b2, b2}, {b2, a2, b2}, {b2, b2, a2}};
  q.weights = {9.0 / 40.0, w1, w1, w1, w2, w2, w2};
  q.degree = 5;
  return q;
}

}  // namespace

const QuadRule &quad_rule(int degree)
{
  static const QuadRule low = midpoint_rule();
  static const QuadRule high = seven_point_rule();
  if (degree <= 2)
  {
    return low;
  }
  if (degree <= 5)
  {
    return high;
  }
  throw Error(ErrorCode::UnsupportedDegree, "no stored rule of degree " + std::to_string(degree));
}

Vec2 map_point(const Triangle &t, const Eigen::Vector3d &bary)
{
  return bary[0] * t[0] + bary[1] * t[1] + bary[2] * t[2];
}

double integrate(const Triangle &t, const std::function<double(const Vec2 &)> &f, int degree)
{
  const QuadRule &q = quad_rule(degree);
  double s = 0.0;
  for (std::size_t k = 0; k < q.weights.size(); k++)
  {
    s += q.weights[k] * f(map_point(t, q.points[k]));
  }
  return std::abs(signed_area(t)) * s;
}

double integrate(const Submesh &s, const std::function<double(const Vec2 &)> &f, int degree)
{
  double total = 0.0;
  for (int t = 0; t < s.num_triangles(); t++)
  {
    total += integrate(s.triangle(t), f, degree);
  }
  return total;
}

RT0Local rt0_basis(const Triangle &t, int face)
{
  const double two_area = 2.0 * signed_area(t);
  if (!(std::abs(two_area) > 0.0))
  {
    throw Error(ErrorCode::DegenerateCell, "degenerate triangle in RT0 basis");
  }
  RT0Local v;
  v.c = 1.0 / two_area;
  v.a = -t[face] / two_area;
  return v;
}

RT0Local rt0_from_fluxes(const Triangle &t, const Eigen::Vector3d &flux)
{
  const double two_area = 2.0 * signed_area(t);
  RT0Local v;
  v.c = flux.sum() / two_area;
  v.a = -(flux[0] * t[0] + flux[1] * t[1] + flux[2] * t[2]) / two_area;
  return v;
}

double edge_flux(const RT0Local &v, const Vec2 &p, const Vec2 &q)
{
  const Vec2 d = q - p;
  return v(0.5 * (p + q)).dot(Vec2(d.y(), -d.x()));
}

void check_spd(const Eigen::Matrix2d &w)
{
  const double scale = w.cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || !w.allFinite() || std::abs(w(0, 1) - w(1, 0)) > 1e-12 * scale)
  {
    throw Error(ErrorCode::SingularWeight, "weight is not symmetric");
  }
  if (!(w(0, 0) > 0.0) || !(w.determinant() > 1e-14 * scale * scale))
  {
    throw Error(ErrorCode::SingularWeight, "weight is not positive definite");
  }
}

std::vector<Eigen::Matrix3Xd> subtriangle_flux_maps(const Submesh &s)
{
  const int ne = s.num_exterior(), ns = s.num_spokes(), nd = ne + ns;
  std::vector<Eigen::Matrix3Xd> maps(s.num_triangles(), Eigen::Matrix3Xd::Zero(3, nd));
  if (!s.fan)
  {
    for (int i = 0; i < 3; i++)
    {
      maps[0]((i + 2) % 3, i) = 1.0;
    }
    return maps;
  }
  const int n = ne;
  for (int i = 0; i < n; i++)
  {
    maps[i](0, i) = 1.0;
  }
  for (int j = 0; j < ns; j++)
  {
    maps[(j + n - 1) % n](1, ne + j) = 1.0;
    maps[j](2, ne + j) = -1.0;
  }
  return maps;
}

namespace
{

// (v_m, W v_l) on one triangle; exact by the midpoint rule.
Eigen::Matrix3d rt0_mass(const Triangle &t, const Eigen::Matrix2d &w)
{
  const double area = signed_area(t);
  const QuadRule &q = quad_rule(2);
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (std::size_t k = 0; k < q.weights.size(); k++)
  {
    const Vec2 x = map_point(t, q.points[k]);
    Eigen::Matrix<double, 2, 3> v;
    for (int i = 0; i < 3; i++)
    {
      v.col(i) = (x - t[i]) / (2.0 * area);
    }
    m += q.weights[k] * v.transpose() * w * v;
  }
  return area * m;
}

}  // namespace

LocalBlocks assemble_blocks(const Submesh &s, const Eigen::Matrix2d &inverse_diffusion)
{
  check_spd(inverse_diffusion);
  const int ne = s.num_exterior(), ns = s.num_spokes(), nd = ne + ns, nt = s.num_triangles();
  const auto maps = subtriangle_flux_maps(s);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nd, nd);
  Eigen::MatrixXd div = Eigen::MatrixXd::Zero(nt, nd);  // integral of div over subtriangle t
  double area = 0.0;
  for (int t = 0; t < nt; t++)
  {
    a += maps[t].transpose() * rt0_mass(s.triangle(t), inverse_diffusion) * maps[t];
    div.row(t) = maps[t].colwise().sum();
    area += s.areas[t];
  }
  const Eigen::RowVectorXd total = div.colwise().sum();
  const int nq = nt - 1;
  Eigen::MatrixXd b0(nq, nd);
  for (int l = 0; l < nq; l++)
  {
    b0.row(l) = -(div.row(l) - (s.areas[l] / area) * total);
  }
  LocalBlocks blocks;
  blocks.a_ext_ext = a.topLeftCorner(ne, ne);
  blocks.a_int_ext = a.bottomLeftCorner(ns, ne);
  blocks.a_int_int = a.bottomRightCorner(ns, ns);
  blocks.b0_ext = b0.leftCols(ne);
  blocks.b0_int = b0.rightCols(ns);
  return blocks;
}

namespace
{

Eigen::MatrixXd interior_saddle(const LocalBlocks &blocks)
{
  const int ns = static_cast<int>(blocks.a_int_int.rows());
  const int nq = static_cast<int>(blocks.b0_int.rows());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(ns + nq, ns + nq);
  s.topLeftCorner(ns, ns) = blocks.a_int_int;
  s.topRightCorner(ns, nq) = blocks.b0_int.transpose();
  s.bottomLeftCorner(nq, ns) = blocks.b0_int;
  return s;
}

Eigen::MatrixXd interior_coupling(const LocalBlocks &blocks)
{
  Eigen::MatrixXd r(blocks.a_int_ext.rows() + blocks.b0_ext.rows(), blocks.a_ext_ext.cols());
  r << blocks.a_int_ext, blocks.b0_ext;
  return r;
}

}  // namespace

Eigen::MatrixXd schur_a_mfe(const LocalBlocks &blocks)
{
  if (blocks.a_int_int.rows() == 0)
  {
    return blocks.a_ext_ext;
  }
  const Eigen::MatrixXd s = interior_saddle(blocks);
  const Eigen::MatrixXd r = interior_coupling(blocks);
  Eigen::MatrixXd x;
  try
  {
    x = dense_lu_solve(s, r);
  }
  catch (const Error &)
  {
    throw Error(ErrorCode::SingularLocalSaddle, "interior saddle block is singular");
  }
  const Eigen::MatrixXd a = blocks.a_ext_ext - r.transpose() * x;
  return 0.5 * (a + a.transpose());
}

Eigen::MatrixXd local_response(const LocalBlocks &blocks)
{
  if (blocks.a_int_int.rows() == 0)
  {
    return Eigen::MatrixXd::Zero(0, blocks.a_ext_ext.cols());
  }
  try
  {
    return -dense_lu_solve(interior_saddle(blocks), interior_coupling(blocks));
  }
  catch (const Error &)
  {
    throw Error(ErrorCode::SingularLocalSaddle, "interior saddle block is singular");
  }
}

std::vector<RT0Local> assemble_field(const Submesh &s, const Eigen::VectorXd &u_ext,
                                     const Eigen::VectorXd &spokes)
{
  const auto maps = subtriangle_flux_maps(s);
  Eigen::VectorXd dofs(s.num_exterior() + s.num_spokes());
  dofs << u_ext, spokes.head(s.num_spokes());
  std::vector<RT0Local> field(s.num_triangles());
  for (int t = 0; t < s.num_triangles(); t++)
  {
    field[t] = rt0_from_fluxes(s.triangle(t), maps[t] * dofs);
  }
  return field;
}

Eigen::MatrixXd fe_stiffness(const Submesh &s, const Eigen::Matrix2d &diffusion)
{
  const int np = s.num_points();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(np, np);
  for (int t = 0; t < s.num_triangles(); t++)
  {
    const Triangle tri = s.triangle(t);
    const double area = signed_area(tri);
    Eigen::Matrix<double, 2, 3> g;
    for (int i = 0; i < 3; i++)
    {
      const Vec2 &pj = tri[(i + 1) % 3], &pk = tri[(i + 2) % 3];
      g.col(i) = Vec2(pj.y() - pk.y(), pk.x() - pj.x()) / (2.0 * area);
    }
    const Eigen::Matrix3d local = area * g.transpose() * diffusion * g;
    for (int i = 0; i < 3; i++)
    {
      for (int j = 0; j < 3; j++)
      {
        m(s.triangles[t][i], s.triangles[t][j]) += local(i, j);
      }
    }
  }
  return m;
}

Eigen::MatrixXd fe_mass(const Submesh &s)
{
  const int np = s.num_points();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(np, np);
  for (int t = 0; t < s.num_triangles(); t++)
  {
    const double a12 = s.areas[t] / 12.0;
    for (int i = 0; i < 3; i++)
    {
      for (int j = 0; j < 3; j++)
      {
        m(s.triangles[t][i], s.triangles[t][j]) += (i == j ? 2.0 : 1.0) * a12;
      }
    }
  }
  return m;
}

CellLocalMatrices cell_matrices(const Submesh &s, const Eigen::Matrix2d &inverse_diffusion,
                                const Eigen::Matrix2d &diffusion)
{
  CellLocalMatrices m;
  m.a_mfe = schur_a_mfe(assemble_blocks(s, inverse_diffusion));
  m.s_fe = fe_stiffness(s, diffusion);
  m.m_fe = fe_mass(s);
  return m;
}

std::vector<CellLocalMatrices> all_cell_matrices(const Mesh &mesh, const std::vector<double> &k)
{
  std::vector<CellLocalMatrices> out(mesh.num_cells());
  parallel_for(mesh.num_cells(), [&](int K) {
    const double kk = k.empty() ? 1.0 : k[K];
    const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
    out[K] = cell_matrices(mesh.submeshes[K], id / kk, id * kk);
  });
  return out;
}

}  // namespace adaptfv
