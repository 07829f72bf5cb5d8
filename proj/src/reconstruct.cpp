#include "adaptfv/reconstruct.hpp"

#include <map>
#include <numeric>
#include <utility>

#include "adaptfv/errors.hpp"
#include "adaptfv/parallel.hpp"

namespace adaptfv
{

GlobalSubmesh build_global_submesh(const Mesh &mesh)
{
  GlobalSubmesh g;
  g.points = mesh.vertices;
  const int nv = mesh.num_vertices();
  for (int K = 0; K < mesh.num_cells(); K++)
  {
    g.first_triangle.push_back(g.num_triangles());
    const auto &loop = mesh.cells[K];
    const Submesh &s = mesh.submeshes[K];
    if (!s.fan)
    {
      g.triangles.push_back({loop[0], loop[1], loop[2]});
      g.parent.push_back(K);
      continue;
    }
    const int c = static_cast<int>(g.points.size());
    g.points.push_back(s.center);
    const int n = static_cast<int>(loop.size());
    for (int i = 0; i < n; i++)
    {
      g.triangles.push_back({c, loop[i], loop[(i + 1) % n]});
      g.parent.push_back(K);
    }
  }
  (void)nv;
  std::map<std::pair<int, int>, int> edge_id;
  std::vector<int> edge_count;
  g.triangle_edges.resize(g.triangles.size());
  for (int t = 0; t < g.num_triangles(); t++)
  {
    for (int m = 0; m < 3; m++)
    {
      int a = g.triangles[t][(m + 1) % 3], b = g.triangles[t][(m + 2) % 3];
      if (a > b)
      {
        std::swap(a, b);
      }
      auto [it, inserted] = edge_id.try_emplace({a, b}, g.num_edges());
      if (inserted)
      {
        g.edges.push_back({a, b});
        edge_count.push_back(0);
      }
      edge_count[it->second]++;
      g.triangle_edges[t][m] = it->second;
    }
  }
  g.boundary_edge.assign(g.edges.size(), 0);
  g.boundary_point.assign(g.points.size(), 0);
  for (int e = 0; e < g.num_edges(); e++)
  {
    if (edge_count[e] == 1)
    {
      g.boundary_edge[e] = 1;
      g.boundary_point[g.edges[e][0]] = 1;
      g.boundary_point[g.edges[e][1]] = 1;
    }
  }
  return g;
}

RT0Field lift_flux_simplicial(const Mesh &mesh, const FaceFluxVector &u)
{
  RT0Field field;
  field.cells.resize(mesh.num_cells());
  for (int K = 0; K < mesh.num_cells(); K++)
  {
    if (!mesh.is_triangle(K))
    {
      throw Error(ErrorCode::InvalidInput, "explicit RT0 lifting needs triangular cells");
    }
    const Eigen::VectorXd ext = cell_exterior(mesh, K, u);
    const auto &l = mesh.cells[K];
    const Triangle t{mesh.vertices[l[0]], mesh.vertices[l[1]], mesh.vertices[l[2]]};
    Eigen::Vector3d flux;
    for (int i = 0; i < 3; i++)
    {
      flux[(i + 2) % 3] = ext[i];
    }
    field.cells[K] = {rt0_from_fluxes(t, flux)};
  }
  return field;
}

LocalNeumannSolution solve_local_neumann(const Submesh &s, const Eigen::VectorXd &u_ext, double p_mean,
                                         const Eigen::Matrix2d &inverse_diffusion)
{
  LocalNeumannSolution out;
  const LocalBlocks blocks = assemble_blocks(s, inverse_diffusion);
  const Eigen::MatrixXd response = local_response(blocks);
  const int ns = s.num_spokes();
  const Eigen::VectorXd x = response.rows() > 0 ? Eigen::VectorXd(response * u_ext) : Eigen::VectorXd();
  out.spoke_fluxes = x.head(ns);
  out.field = assemble_field(s, u_ext, out.spoke_fluxes);
  const int nt = s.num_triangles();
  double area = 0.0;
  for (double a : s.areas)
  {
    area += a;
  }
  // Potential sum_l lambda_l q_l + P_K with q_l = chi_l - |kappa_l|/|K|.
  double shift = 0.0;
  for (int l = 0; l + 1 < nt; l++)
  {
    shift += x[ns + l] * s.areas[l] / area;
  }
  out.potential.assign(nt, p_mean - shift);
  for (int l = 0; l + 1 < nt; l++)
  {
    out.potential[l] += x[ns + l];
  }
  return out;
}

RT0Field lift_flux(const Mesh &mesh, const FaceFluxVector &u, const std::vector<double> &k)
{
  RT0Field field;
  field.cells.resize(mesh.num_cells());
  parallel_for(mesh.num_cells(), [&](int K) {
    const Submesh &s = mesh.submeshes[K];
    const Eigen::VectorXd ext = cell_exterior(mesh, K, u);
    if (!s.fan)
    {
      field.cells[K] = assemble_field(s, ext, Eigen::VectorXd());
      return;
    }
    const double kk = k.empty() ? 1.0 : k[K];
    field.cells[K] = solve_local_neumann(s, ext, 0.0, Eigen::Matrix2d::Identity() / kk).field;
  });
  return field;
}

namespace
{

Eigen::Vector3d barycentric(const Triangle &t, const Vec2 &x)
{
  Eigen::Matrix2d m;
  m.col(0) = t[1] - t[0];
  m.col(1) = t[2] - t[0];
  const Vec2 l = m.inverse() * (x - t[0]);
  return {1.0 - l.x() - l.y(), l.x(), l.y()};
}

std::array<Vec2, 3> barycentric_gradients(const Triangle &t)
{
  const double two_area = 2.0 * signed_area(t);
  std::array<Vec2, 3> g;
  for (int i = 0; i < 3; i++)
  {
    const Vec2 &pj = t[(i + 1) % 3], &pk = t[(i + 2) % 3];
    g[i] = Vec2(pj.y() - pk.y(), pk.x() - pj.x()) / two_area;
  }
  return g;
}

std::array<Vec2, 6> p2_nodes(const Triangle &t)
{
  return {t[0], t[1], t[2], 0.5 * (t[0] + t[1]), 0.5 * (t[1] + t[2]), 0.5 * (t[2] + t[0])};
}

}  // namespace

double p2_value(const Triangle &t, const std::array<double, 6> &v, const Vec2 &x)
{
  const Eigen::Vector3d l = barycentric(t, x);
  double s = 0.0;
  for (int i = 0; i < 3; i++)
  {
    s += v[i] * l[i] * (2.0 * l[i] - 1.0);
    s += v[3 + i] * 4.0 * l[i] * l[(i + 1) % 3];
  }
  return s;
}

Vec2 p2_gradient(const Triangle &t, const std::array<double, 6> &v, const Vec2 &x)
{
  const Eigen::Vector3d l = barycentric(t, x);
  const auto g = barycentric_gradients(t);
  Vec2 s = Vec2::Zero();
  for (int i = 0; i < 3; i++)
  {
    const int j = (i + 1) % 3;
    s += v[i] * (4.0 * l[i] - 1.0) * g[i];
    s += v[3 + i] * 4.0 * (l[i] * g[j] + l[j] * g[i]);
  }
  return s;
}

std::vector<double> repeat_cell_values(const GlobalSubmesh &gsm, const Eigen::VectorXd &p)
{
  std::vector<double> out(gsm.num_triangles());
  for (int t = 0; t < gsm.num_triangles(); t++)
  {
    out[t] = p[gsm.parent[t]];
  }
  return out;
}

P2Potential postprocess_potential(const GlobalSubmesh &gsm, const RT0Field &u,
                                  const std::vector<double> &means, const std::vector<double> &k)
{
  P2Potential out;
  out.values.resize(gsm.num_triangles());
  for (int t = 0; t < gsm.num_triangles(); t++)
  {
    const int K = gsm.parent[t];
    const RT0Local &piece = u.cells[K][t - gsm.first_triangle[K]];
    const double kk = k.empty() ? 1.0 : k[K];
    const Triangle tri = gsm.triangle(t);
    const Vec2 xc = (tri[0] + tri[1] + tri[2]) / 3.0;
    const Vec2 a = piece.a + piece.c * xc;
    // Mean of |x - xc|^2 over the triangle.
    const double m2 = ((tri[0] - xc).squaredNorm() + (tri[1] - xc).squaredNorm() +
                       (tri[2] - xc).squaredNorm()) / 12.0;
    const double shift = means[t] + piece.c * m2 / (2.0 * kk);
    const auto nodes = p2_nodes(tri);
    for (int i = 0; i < 6; i++)
    {
      const Vec2 y = nodes[i] - xc;
      out.values[t][i] = -(a.dot(y) + 0.5 * piece.c * y.squaredNorm()) / kk + shift;
    }
  }
  return out;
}

P2Potential average_p2(const GlobalSubmesh &gsm, const P2Potential &p, const ScalarFunction &g)
{
  const int np = gsm.num_points();
  const int ndof = np + gsm.num_edges();
  std::vector<double> sum(ndof, 0.0);
  std::vector<int> count(ndof, 0);
  auto dofs = [&](int t) {
    const auto &v = gsm.triangles[t];
    const auto &e = gsm.triangle_edges[t];
    return std::array<int, 6>{v[0], v[1], v[2], np + e[2], np + e[0], np + e[1]};
  };
  for (int t = 0; t < gsm.num_triangles(); t++)
  {
    const auto d = dofs(t);
    for (int i = 0; i < 6; i++)
    {
      sum[d[i]] += p.values[t][i];
      count[d[i]]++;
    }
  }
  std::vector<double> value(ndof);
  for (int i = 0; i < ndof; i++)
  {
    value[i] = sum[i] / count[i];
  }
  for (int i = 0; i < np; i++)
  {
    if (gsm.boundary_point[i])
    {
      value[i] = g ? g(gsm.points[i]) : 0.0;
    }
  }
  for (int e = 0; e < gsm.num_edges(); e++)
  {
    if (gsm.boundary_edge[e])
    {
      const Vec2 m = 0.5 * (gsm.points[gsm.edges[e][0]] + gsm.points[gsm.edges[e][1]]);
      value[np + e] = g ? g(m) : 0.0;
    }
  }
  P2Potential out;
  out.values.resize(gsm.num_triangles());
  for (int t = 0; t < gsm.num_triangles(); t++)
  {
    const auto d = dofs(t);
    for (int i = 0; i < 6; i++)
    {
      out.values[t][i] = value[d[i]];
    }
  }
  return out;
}

PointValues point_values_avg(const Mesh &mesh, const CellPotentialVector &p, const ScalarFunction &g)
{
  PointValues z;
  z.vertex.resize(mesh.num_vertices());
  for (int a = 0; a < mesh.num_vertices(); a++)
  {
    if (mesh.boundary_vertex[a])
    {
      z.vertex[a] = g ? g(mesh.vertices[a]) : 0.0;
      continue;
    }
    double s = 0.0;
    for (int K : mesh.vertex_cells[a])
    {
      s += p[K];
    }
    z.vertex[a] = s / mesh.vertex_cells[a].size();
  }
  z.center = p;
  return z;
}

PointValues point_values_hyb(const Mesh &mesh, const Eigen::VectorXd &multipliers,
                             const CellPotentialVector &p, const ScalarFunction &g)
{
  if (multipliers.size() != mesh.num_faces())
  {
    throw Error(ErrorCode::MultipliersUnavailable, "no face multipliers for this discretization");
  }
  PointValues z;
  z.vertex.resize(mesh.num_vertices());
  for (int a = 0; a < mesh.num_vertices(); a++)
  {
    if (mesh.boundary_vertex[a])
    {
      z.vertex[a] = g ? g(mesh.vertices[a]) : 0.0;
      continue;
    }
    double s = 0.0;
    for (int f : mesh.vertex_faces[a])
    {
      s += multipliers[f];
    }
    z.vertex[a] = s / mesh.vertex_faces[a].size();
  }
  z.center = p;
  return z;
}

Eigen::VectorXd gather_points(const Mesh &mesh, int K, const PointValues &z)
{
  const auto &loop = mesh.cells[K];
  const int n = static_cast<int>(loop.size());
  const bool fan = mesh.submeshes[K].fan;
  Eigen::VectorXd out(fan ? n + 1 : n);
  for (int i = 0; i < n; i++)
  {
    out[i] = z.vertex[loop[i]];
  }
  if (fan)
  {
    out[n] = z.center[K];
  }
  return out;
}

Eigen::VectorXd gather_faces(const Mesh &mesh, int K, const PointValues &z)
{
  const auto &loop = mesh.cells[K];
  const int n = static_cast<int>(loop.size());
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; i++)
  {
    out[i] = 0.5 * (z.vertex[loop[i]] + z.vertex[loop[(i + 1) % n]]);
  }
  return out;
}

std::vector<double> redistribute_flux(double u, const std::vector<double> &lengths)
{
  const double total = std::accumulate(lengths.begin(), lengths.end(), 0.0);
  std::vector<double> out(lengths.size());
  for (std::size_t i = 0; i < lengths.size(); i++)
  {
    out[i] = u * lengths[i] / total;
  }
  return out;
}

P2Potential reconstruct_p2_polytopal(const Mesh &mesh, const GlobalSubmesh &gsm,
                                     const std::vector<LocalNeumannSolution> &local,
                                     const std::vector<double> &k, const ScalarFunction &g)
{
  RT0Field u;
  u.cells.resize(mesh.num_cells());
  std::vector<double> means(gsm.num_triangles());
  for (int K = 0; K < mesh.num_cells(); K++)
  {
    u.cells[K] = local[K].field;
    for (std::size_t t = 0; t < local[K].potential.size(); t++)
    {
      means[gsm.first_triangle[K] + t] = local[K].potential[t];
    }
  }
  return average_p2(gsm, postprocess_potential(gsm, u, means, k), g);
}

}  // namespace adaptfv
