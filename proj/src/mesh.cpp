#include "adaptfv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "adaptfv/errors.hpp"

namespace adaptfv
{

namespace
{

double cross(const Vec2 &a, const Vec2 &b)
{
  return a.x() * b.y() - a.y() * b.x();
}

double signed_area(const std::vector<Vec2> &v, const std::vector<int> &loop)
{
  double s = 0.0;
  const auto n = loop.size();
  for (std::size_t i = 0; i < n; i++)
  {
    s += cross(v[loop[i]], v[loop[(i + 1) % n]]);
  }
  return 0.5 * s;
}

Vec2 polygon_centroid(const std::vector<Vec2> &v, const std::vector<int> &loop, double area)
{
  // Shift to the first vertex to limit cancellation.
  const Vec2 o = v[loop[0]];
  Vec2 c = Vec2::Zero();
  const auto n = loop.size();
  for (std::size_t i = 0; i < n; i++)
  {
    const Vec2 p = v[loop[i]] - o, q = v[loop[(i + 1) % n]] - o;
    c += (p + q) * cross(p, q);
  }
  return o + c / (6.0 * area);
}

bool segments_intersect(const Vec2 &p1, const Vec2 &p2, const Vec2 &q1, const Vec2 &q2)
{
  const double d1 = cross(p2 - p1, q1 - p1), d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1), d4 = cross(q2 - q1, p2 - q1);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

void check_simple(const std::vector<Vec2> &v, const std::vector<int> &loop, int cell)
{
  const int n = static_cast<int>(loop.size());
  for (int i = 0; i < n; i++)
  {
    for (int j = i + 1; j < n; j++)
    {
      if (loop[i] == loop[j])
      {
        throw Error(ErrorCode::InvalidInput,
                    "cell " + std::to_string(cell) + " repeats vertex " + std::to_string(loop[i]));
      }
    }
  }
  for (int i = 0; i < n; i++)
  {
    for (int j = i + 2; j < n; j++)
    {
      if (i == 0 && j == n - 1)
      {
        continue;
      }
      if (segments_intersect(v[loop[i]], v[loop[(i + 1) % n]], v[loop[j]], v[loop[(j + 1) % n]]))
      {
        throw Error(ErrorCode::InvalidInput, "cell " + std::to_string(cell) + " is not simple");
      }
    }
  }
}

Submesh trivial_submesh(const std::vector<Vec2> &v, const std::vector<int> &loop, double area)
{
  Submesh s;
  s.fan = false;
  s.center = (v[loop[0]] + v[loop[1]] + v[loop[2]]) / 3.0;
  s.points = {v[loop[0]], v[loop[1]], v[loop[2]]};
  s.triangles = {{0, 1, 2}};
  s.exterior = {{0, 1}, {1, 2}, {2, 0}};
  s.areas = {area};
  return s;
}

Submesh fan_submesh(const std::vector<Vec2> &v, const std::vector<int> &loop, const Vec2 &center,
                    double area, int cell)
{
  const int n = static_cast<int>(loop.size());
  Submesh s;
  s.fan = true;
  s.center = center;
  for (int i = 0; i < n; i++)
  {
    s.points.push_back(v[loop[i]]);
  }
  s.points.push_back(center);
  for (int i = 0; i < n; i++)
  {
    const int ip = (i + 1) % n;
    s.triangles.push_back({n, i, ip});
    s.exterior.push_back({i, ip});
    s.spokes.push_back({n, i});
    const double a = 0.5 * cross(v[loop[i]] - center, v[loop[ip]] - center);
    if (!(a > 1e-14 * area))
    {
      throw Error(ErrorCode::NotStarShaped,
                  "cell " + std::to_string(cell) + " is not star-shaped with respect to its barycenter");
    }
    s.areas.push_back(a);
  }
  return s;
}

std::pair<int, int> edge_key(int a, int b)
{
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

Mesh assemble(MeshKind kind, const std::vector<Vec2> &vertices, std::vector<std::vector<int>> loops,
              const std::vector<int> *newest, const std::vector<int> *levels)
{
  const int nv = static_cast<int>(vertices.size());
  for (const auto &p : vertices)
  {
    if (!std::isfinite(p.x()) || !std::isfinite(p.y()))
    {
      throw Error(ErrorCode::InvalidInput, "non-finite vertex coordinate");
    }
  }

  Mesh m;
  m.kind = kind;
  m.vertices = vertices;
  const int nc = static_cast<int>(loops.size());
  m.areas.resize(nc);
  m.diameters.resize(nc);
  m.centroids.resize(nc);

  double scale = 0.0;
  if (nv > 0)
  {
    Eigen::AlignedBox2d box;
    for (const auto &p : vertices)
    {
      box.extend(p);
    }
    scale = box.diagonal().squaredNorm();
  }

  std::vector<char> flipped(nc, 0);
  for (int K = 0; K < nc; K++)
  {
    auto &loop = loops[K];
    if (loop.size() < 3)
    {
      throw Error(ErrorCode::InvalidInput, "cell " + std::to_string(K) + " has fewer than 3 vertices");
    }
    for (int i : loop)
    {
      if (i < 0 || i >= nv)
      {
        throw Error(ErrorCode::InvalidInput, "cell " + std::to_string(K) + " references vertex " +
                                                 std::to_string(i) + " out of range");
      }
    }
    double a = signed_area(vertices, loop);
    if (!(std::abs(a) > 1e-14 * scale))
    {
      throw Error(ErrorCode::DegenerateCell, "cell " + std::to_string(K) + " has zero area");
    }
    if (a < 0)
    {
      std::reverse(loop.begin(), loop.end());
      flipped[K] = 1;
      a = -a;
    }
    if (kind == MeshKind::polytopal && loop.size() > 3)
    {
      check_simple(vertices, loop, K);
    }
    m.areas[K] = a;
    m.centroids[K] = polygon_centroid(vertices, loop, a);
    double h = 0.0;
    for (std::size_t i = 0; i < loop.size(); i++)
    {
      for (std::size_t j = i + 1; j < loop.size(); j++)
      {
        h = std::max(h, (vertices[loop[i]] - vertices[loop[j]]).norm());
      }
    }
    m.diameters[K] = h;
  }

  std::map<std::pair<int, int>, int> face_of;
  m.cell_faces.resize(nc);
  m.face_signs.resize(nc);
  for (int K = 0; K < nc; K++)
  {
    const auto &loop = loops[K];
    const int n = static_cast<int>(loop.size());
    for (int i = 0; i < n; i++)
    {
      const int a = loop[i], b = loop[(i + 1) % n];
      auto [it, inserted] = face_of.try_emplace(edge_key(a, b), m.num_faces());
      if (inserted)
      {
        Face f;
        f.v0 = a;
        f.v1 = b;
        f.left = K;
        const Vec2 d = vertices[b] - vertices[a];
        f.length = d.norm();
        f.normal = Vec2(d.y(), -d.x()) / f.length;
        f.midpoint = 0.5 * (vertices[a] + vertices[b]);
        m.faces.push_back(f);
        m.cell_faces[K].push_back(it->second);
        m.face_signs[K].push_back(1);
      }
      else
      {
        Face &f = m.faces[it->second];
        if (f.right >= 0 || f.left == K || f.v0 == a)
        {
          throw Error(ErrorCode::NonManifold, "edge (" + std::to_string(a) + "," + std::to_string(b) +
                                                  ") shared inconsistently by more than two cells");
        }
        f.right = K;
        m.cell_faces[K].push_back(it->second);
        m.face_signs[K].push_back(-1);
      }
    }
  }

  m.submeshes.resize(nc);
  double theta = 0.0;
  for (int K = 0; K < nc; K++)
  {
    const auto &loop = loops[K];
    if (kind == MeshKind::simplicial)
    {
      m.submeshes[K] = trivial_submesh(vertices, loop, m.areas[K]);
    }
    else
    {
      m.submeshes[K] = fan_submesh(vertices, loop, m.centroids[K], m.areas[K], K);
    }
    double perimeter = 0.0;
    for (int f : m.cell_faces[K])
    {
      perimeter += m.faces[f].length;
    }
    theta = std::max(theta, m.diameters[K] / (2.0 * m.areas[K] / perimeter));
  }
  m.shape_regularity = theta;

  m.boundary_vertex.assign(nv, 0);
  m.vertex_cells.assign(nv, {});
  m.vertex_faces.assign(nv, {});
  for (int f = 0; f < m.num_faces(); f++)
  {
    const Face &F = m.faces[f];
    if (F.boundary())
    {
      m.boundary_vertex[F.v0] = 1;
      m.boundary_vertex[F.v1] = 1;
    }
    m.vertex_faces[F.v0].push_back(f);
    m.vertex_faces[F.v1].push_back(f);
  }
  for (int K = 0; K < nc; K++)
  {
    for (int i : loops[K])
    {
      m.vertex_cells[i].push_back(K);
    }
  }

  if (kind == MeshKind::simplicial)
  {
    if (newest)
    {
      m.newest_vertex = *newest;
      for (int K = 0; K < nc; K++)
      {
        if (flipped[K])
        {
          // Reversal of (a,b,c) gives (c,b,a): local i maps to 2 - i.
          m.newest_vertex[K] = 2 - m.newest_vertex[K];
        }
      }
    }
    else
    {
      // Refinement edge: the longest edge, ties broken by vertex indices.
      m.newest_vertex.resize(nc);
      for (int K = 0; K < nc; K++)
      {
        const auto &l = loops[K];
        int best = 0;
        std::pair<double, std::pair<int, int>> best_key{-1.0, {0, 0}};
        for (int i = 0; i < 3; i++)
        {
          const auto key = edge_key(l[(i + 1) % 3], l[(i + 2) % 3]);
          const double len = (vertices[key.second] - vertices[key.first]).norm();
          const std::pair<double, std::pair<int, int>> k{len, key};
          if (k > best_key)
          {
            best_key = k;
            best = i;
          }
        }
        m.newest_vertex[K] = best;
      }
    }
  }
  m.levels = levels ? *levels : std::vector<int>(nc, 0);
  m.cells = std::move(loops);
  return m;
}

}  // namespace

double Mesh::total_area() const
{
  double s = 0.0;
  for (double a : areas)
  {
    s += a;
  }
  return s;
}

double Mesh::domain_diameter() const
{
  std::vector<Vec2> pts;
  for (int i = 0; i < num_vertices(); i++)
  {
    if (boundary_vertex[i])
    {
      pts.push_back(vertices[i]);
    }
  }
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); i++)
  {
    for (std::size_t j = i + 1; j < pts.size(); j++)
    {
      d = std::max(d, (pts[i] - pts[j]).squaredNorm());
    }
  }
  return std::sqrt(d);
}

Mesh build_simplicial(const std::vector<Vec2> &vertices,
                      const std::vector<std::array<int, 3>> &triangles)
{
  std::vector<std::vector<int>> loops;
  loops.reserve(triangles.size());
  for (const auto &t : triangles)
  {
    loops.push_back({t[0], t[1], t[2]});
  }
  return assemble(MeshKind::simplicial, vertices, std::move(loops), nullptr, nullptr);
}

Mesh build_polytopal(const std::vector<Vec2> &vertices, const std::vector<std::vector<int>> &loops)
{
  return assemble(MeshKind::polytopal, vertices, loops, nullptr, nullptr);
}

Mesh rebuild_like(const Mesh &like, const std::vector<Vec2> &vertices,
                  const std::vector<std::vector<int>> &loops, const std::vector<int> &newest,
                  const std::vector<int> &levels)
{
  return assemble(like.kind, vertices, loops, like.kind == MeshKind::simplicial ? &newest : nullptr,
                  &levels);
}

Vec2 circumcenter(const Vec2 &a, const Vec2 &b, const Vec2 &c)
{
  const Vec2 u = b - a, v = c - a;
  const double d = 2.0 * cross(u, v);
  const double uu = u.squaredNorm(), vv = v.squaredNorm();
  return a + Vec2(v.y() * uu - u.y() * vv, u.x() * vv - v.x() * uu) / d;
}

AdmissibilityData admissibility(const Mesh &mesh, Collocation collocation, double rel_tol)
{
  AdmissibilityData adm;
  const int nc = mesh.num_cells();
  adm.points.resize(nc);
  for (int K = 0; K < nc; K++)
  {
    const auto &l = mesh.cells[K];
    if (collocation == Collocation::circumcenter)
    {
      if (l.size() != 3)
      {
        throw Error(ErrorCode::InvalidInput, "circumcenter collocation needs triangular cells");
      }
      adm.points[K] = circumcenter(mesh.vertices[l[0]], mesh.vertices[l[1]], mesh.vertices[l[2]]);
    }
    else
    {
      adm.points[K] = mesh.centroids[K];
    }
  }
  adm.distance.resize(mesh.num_faces());
  adm.boundary_points.assign(mesh.num_faces(), Vec2::Zero());
  for (int f = 0; f < mesh.num_faces(); f++)
  {
    const Face &F = mesh.faces[f];
    const Vec2 &xk = adm.points[F.left];
    const double tol = rel_tol * mesh.diameters[F.left];
    if (F.boundary())
    {
      const double d = (F.midpoint - xk).dot(F.normal);
      if (!(std::abs(d) > tol))
      {
        throw Error(ErrorCode::NotAdmissible,
                    "boundary face " + std::to_string(f) + " has vanishing distance to its cell point");
      }
      adm.distance[f] = d;
      adm.boundary_points[f] = xk + d * F.normal;
    }
    else
    {
      const Vec2 dx = adm.points[F.right] - xk;
      const double d = dx.dot(F.normal);
      if (!(std::abs(d) > tol))
      {
        throw Error(ErrorCode::NotAdmissible,
                    "face " + std::to_string(f) + " joins coincident cell points");
      }
      if (std::abs(cross(dx, F.normal)) > 1e-8 * dx.norm())
      {
        throw Error(ErrorCode::NotAdmissible,
                    "face " + std::to_string(f) + " is not orthogonal to the line of cell points");
      }
      adm.distance[f] = d;
    }
  }
  return adm;
}

AdmissibilityData admissibility(const Mesh &mesh)
{
  bool all_triangles = true;
  for (int K = 0; K < mesh.num_cells(); K++)
  {
    all_triangles = all_triangles && mesh.is_triangle(K);
  }
  return admissibility(mesh, mesh.kind == MeshKind::simplicial && all_triangles
                                 ? Collocation::circumcenter
                                 : Collocation::centroid);
}

namespace
{

class PointIndex
{
public:
  int get(const Vec2 &p)
  {
    const auto key = std::make_pair(std::llround(p.x() * 1e9), std::llround(p.y() * 1e9));
    auto [it, inserted] = ids_.try_emplace(key, static_cast<int>(points.size()));
    if (inserted)
    {
      points.push_back(p);
    }
    return it->second;
  }
  std::vector<Vec2> points;

private:
  std::map<std::pair<long long, long long>, int> ids_;
};

void add_triangle_block(PointIndex &idx, std::vector<std::array<int, 3>> &tris, int n, double x0,
                        double x1, double y0, double y1)
{
  if (n < 2 || n % 2 != 0)
  {
    throw Error(ErrorCode::InvalidInput, "triangle grid needs an even number of divisions");
  }
  const double hx = (x1 - x0) / n, hy = (y1 - y0) / n;
  auto even_row = [&](int j) {
    std::vector<int> r;
    for (int i = 0; i <= n; i++)
    {
      r.push_back(idx.get(Vec2(x0 + i * hx, y0 + j * hy)));
    }
    return r;
  };
  auto odd_row = [&](int j) {
    std::vector<int> r{idx.get(Vec2(x0, y0 + j * hy))};
    for (int i = 0; i < n; i++)
    {
      r.push_back(idx.get(Vec2(x0 + (i + 0.5) * hx, y0 + j * hy)));
    }
    r.push_back(idx.get(Vec2(x1, y0 + j * hy)));
    return r;
  };
  for (int j = 0; j < n; j++)
  {
    if (j % 2 == 0)
    {
      const auto E = even_row(j);
      const auto O = odd_row(j + 1);
      tris.push_back({E[0], O[1], O[0]});
      for (int i = 0; i < n; i++)
      {
        tris.push_back({E[i], E[i + 1], O[i + 1]});
      }
      for (int i = 1; i < n; i++)
      {
        tris.push_back({E[i], O[i + 1], O[i]});
      }
      tris.push_back({E[n], O[n + 1], O[n]});
    }
    else
    {
      const auto O = odd_row(j);
      const auto E = even_row(j + 1);
      tris.push_back({O[0], O[1], E[0]});
      for (int i = 0; i < n; i++)
      {
        tris.push_back({O[i + 1], E[i + 1], E[i]});
      }
      for (int i = 1; i < n; i++)
      {
        tris.push_back({O[i], O[i + 1], E[i]});
      }
      tris.push_back({O[n], O[n + 1], E[n]});
    }
  }
}

}  // namespace

Mesh triangle_grid(int n, double x0, double x1, double y0, double y1)
{
  PointIndex idx;
  std::vector<std::array<int, 3>> tris;
  add_triangle_block(idx, tris, n, x0, x1, y0, y1);
  return build_simplicial(idx.points, tris);
}

Mesh lshape_triangle_mesh(int n)
{
  PointIndex idx;
  std::vector<std::array<int, 3>> tris;
  add_triangle_block(idx, tris, n, -1.0, 0.0, 0.0, 1.0);
  add_triangle_block(idx, tris, n, 0.0, 1.0, 0.0, 1.0);
  add_triangle_block(idx, tris, n, 0.0, 1.0, -1.0, 0.0);
  return build_simplicial(idx.points, tris);
}

Mesh diagonal_triangle_grid(int n, double x0, double x1, double y0, double y1)
{
  PointIndex idx;
  std::vector<std::array<int, 3>> tris;
  const double hx = (x1 - x0) / n, hy = (y1 - y0) / n;
  for (int j = 0; j < n; j++)
  {
    for (int i = 0; i < n; i++)
    {
      const int a = idx.get(Vec2(x0 + i * hx, y0 + j * hy));
      const int b = idx.get(Vec2(x0 + (i + 1) * hx, y0 + j * hy));
      const int c = idx.get(Vec2(x0 + (i + 1) * hx, y0 + (j + 1) * hy));
      const int d = idx.get(Vec2(x0 + i * hx, y0 + (j + 1) * hy));
      tris.push_back({a, b, c});
      tris.push_back({a, c, d});
    }
  }
  return build_simplicial(idx.points, tris);
}

Mesh rectangle_grid(int nx, int ny, double x0, double x1, double y0, double y1)
{
  std::vector<Vec2> v;
  for (int j = 0; j <= ny; j++)
  {
    for (int i = 0; i <= nx; i++)
    {
      v.emplace_back(x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny);
    }
  }
  std::vector<std::vector<int>> loops;
  for (int j = 0; j < ny; j++)
  {
    for (int i = 0; i < nx; i++)
    {
      const int a = j * (nx + 1) + i;
      loops.push_back({a, a + 1, a + nx + 2, a + nx + 1});
    }
  }
  return build_polytopal(v, loops);
}

Mesh lshape_rectangle_mesh(int n)
{
  PointIndex idx;
  std::vector<std::vector<int>> loops;
  const double h = 1.0 / n;
  for (int j = 0; j < 2 * n; j++)
  {
    for (int i = 0; i < 2 * n; i++)
    {
      const double x = -1.0 + i * h, y = -1.0 + j * h;
      if (x + 0.5 * h < 0.0 && y + 0.5 * h < 0.0)
      {
        continue;
      }
      loops.push_back({idx.get(Vec2(x, y)), idx.get(Vec2(x + h, y)), idx.get(Vec2(x + h, y + h)),
                       idx.get(Vec2(x, y + h))});
    }
  }
  return build_polytopal(idx.points, loops);
}

}  // namespace adaptfv
