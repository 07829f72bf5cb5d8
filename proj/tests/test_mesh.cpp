#include <doctest.h>

#include <cmath>
#include <numeric>

#include "adaptfv/mesh.hpp"
#include "support.hpp"

using namespace adaptfv;
using adaptfv::test::error_code;

namespace
{

int boundary_faces(const Mesh &m)
{
  int n = 0;
  for (const Face &f : m.faces)
  {
    n += f.boundary();
  }
  return n;
}

double area_sum(const Mesh &m)
{
  return std::accumulate(m.areas.begin(), m.areas.end(), 0.0);
}

// Intersection of two perpendicular bisectors, solved independently of circumcenter().
Vec2 bisector_intersection(const Vec2 &a, const Vec2 &b, const Vec2 &c)
{
  Eigen::Matrix2d m;
  m.row(0) = (b - a).transpose();
  m.row(1) = (c - a).transpose();
  const Vec2 rhs(0.5 * (b.squaredNorm() - a.squaredNorm()), 0.5 * (c.squaredNorm() - a.squaredNorm()));
  return m.fullPivLu().solve(rhs);
}

}  // namespace

TEST_CASE("square split by its center point")
{
  const Mesh m = build_simplicial({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}},
                                  {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}});
  CHECK(m.num_cells() == 4);
  CHECK(m.num_faces() == 8);
  CHECK(boundary_faces(m) == 4);
  CHECK(area_sum(m) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("reference triangle in either orientation")
{
  for (const std::array<int, 3> tri : {std::array<int, 3>{0, 1, 2}, std::array<int, 3>{0, 2, 1}})
  {
    const Mesh m = build_simplicial({{0, 0}, {1, 0}, {0, 1}}, {tri});
    CHECK(m.num_cells() == 1);
    CHECK(m.areas[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(boundary_faces(m) == 3);
  }
}

TEST_CASE("face normals point out of the left cell")
{
  const Mesh m = triangle_grid(4);
  for (const Face &f : m.faces)
  {
    CHECK(f.normal.norm() == doctest::Approx(1.0));
    CHECK(f.normal.dot(f.midpoint - m.centroids[f.left]) > 0.0);
    if (!f.boundary())
    {
      CHECK(f.left < f.right);
    }
  }
}

TEST_CASE("generators satisfy Euler's formula and cover the domain")
{
  struct Case
  {
    Mesh mesh;
    double area;
  };
  for (const Case &c : {Case{triangle_grid(6), 1.0}, Case{rectangle_grid(3, 5), 1.0},
                        Case{lshape_triangle_mesh(4), 3.0}, Case{lshape_rectangle_mesh(4), 3.0},
                        Case{diagonal_triangle_grid(4), 1.0}})
  {
    const Mesh &m = c.mesh;
    CHECK(m.num_vertices() - m.num_faces() + m.num_cells() == 1);
    CHECK(area_sum(m) == doctest::Approx(c.area).epsilon(1e-12));
  }
}

TEST_CASE("coincident circumcenters are not admissible")
{
  const Mesh m = build_simplicial({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}});
  CHECK(error_code([&] { admissibility(m, Collocation::circumcenter); }) == ErrorCode::NotAdmissible);
}

TEST_CASE("equilateral rhombus distances")
{
  const double h = std::sqrt(3.0) / 2.0;
  const std::vector<Vec2> v{{0, 0}, {1, 0}, {0.5, h}, {1.5, h}};
  const Mesh m = build_simplicial(v, {{0, 1, 2}, {1, 3, 2}});
  const AdmissibilityData adm = admissibility(m, Collocation::circumcenter);
  const Vec2 x0 = bisector_intersection(v[0], v[1], v[2]);
  const Vec2 x1 = bisector_intersection(v[1], v[3], v[2]);
  CHECK((adm.points[0] - x0).norm() < 1e-14);
  CHECK((adm.points[1] - x1).norm() < 1e-14);
  for (int f = 0; f < m.num_faces(); f++)
  {
    if (!m.faces[f].boundary())
    {
      // Twice the inradius of a unit equilateral triangle.
      CHECK(adm.distance[f] == doctest::Approx(std::sqrt(3.0) / 3.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("rectangles with centroid collocation")
{
  const Mesh m = rectangle_grid(2, 1, 0.0, 2.0, 0.0, 0.5);
  const AdmissibilityData adm = admissibility(m, Collocation::centroid);
  for (int f = 0; f < m.num_faces(); f++)
  {
    const Face &F = m.faces[f];
    if (F.boundary())
    {
      CHECK(adm.distance[f] == doctest::Approx(std::abs((F.midpoint - m.centroids[F.left]).dot(F.normal))));
    }
    else
    {
      CHECK(adm.distance[f] == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("fan submeshes")
{
  std::vector<Vec2> hept;
  std::vector<int> loop;
  for (int i = 0; i < 7; i++)
  {
    hept.emplace_back(std::cos(2 * M_PI * i / 7), std::sin(2 * M_PI * i / 7));
    loop.push_back(i);
  }
  const Mesh m = build_polytopal(hept, {loop});
  CHECK(m.submeshes[0].fan);
  CHECK(m.submeshes[0].num_triangles() == 7);
  CHECK(m.submeshes[0].num_spokes() == 7);
  CHECK(m.submeshes[0].num_exterior() == 7);

  const Mesh r = rectangle_grid(1, 1);
  CHECK(r.submeshes[0].num_triangles() == 4);
  double sub = 0.0;
  for (double a : r.submeshes[0].areas)
  {
    sub += a;
  }
  CHECK(sub == doctest::Approx(1.0).epsilon(1e-14));

  const Mesh tri = triangle_grid(2);
  CHECK_FALSE(tri.submeshes[0].fan);
  CHECK(tri.submeshes[0].num_triangles() == 1);
}

TEST_CASE("thin L-shaped cell is rejected")
{
  const std::vector<Vec2> v{{0, 0}, {3, 0}, {3, 0.2}, {0.2, 0.2}, {0.2, 3}, {0, 3}};
  CHECK(error_code([&] { build_polytopal(v, {{0, 1, 2, 3, 4, 5}}); }) == ErrorCode::NotStarShaped);
}

TEST_CASE("degenerate and malformed input")
{
  CHECK(error_code([] { build_simplicial({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}}); }) ==
        ErrorCode::DegenerateCell);
  CHECK(error_code([] { build_simplicial({{0, 0}, {1, 0}}, {{0, 1, 5}}); }) == ErrorCode::InvalidInput);
}

TEST_CASE("refinement")
{
  const Mesh two = build_simplicial({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}});
  SUBCASE("marking every triangle bisects each once, conformingly")
  {
    const Mesh r = refine(two, {0, 1});
    CHECK(r.num_cells() == 4);
    CHECK(r.num_vertices() - r.num_faces() + r.num_cells() == 1);
    CHECK(area_sum(r) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("marking nothing returns the same mesh")
  {
    const Mesh r = refine(two, {});
    CHECK(r.num_cells() == two.num_cells());
    CHECK(r.vertices == two.vertices);
  }
  SUBCASE("one rectangle of a 2x2 grid leaves hanging nodes")
  {
    const Mesh g = rectangle_grid(2, 2);
    const Mesh r = refine(g, {0});
    CHECK(r.num_cells() == 7);
    CHECK(area_sum(r) == doctest::Approx(1.0).epsilon(1e-12));
    int pentagons = 0;
    for (int K = 0; K < r.num_cells(); K++)
    {
      pentagons += r.cells[K].size() == 5;
    }
    CHECK(pentagons == 2);
  }
  SUBCASE("repeated local refinement keeps the area and conformity")
  {
    Mesh m = lshape_triangle_mesh(2);
    for (int it = 0; it < 6; it++)
    {
      int corner = 0;
      for (int K = 0; K < m.num_cells(); K++)
      {
        if (m.centroids[K].norm() < m.centroids[corner].norm())
        {
          corner = K;
        }
      }
      m = refine(m, {corner});
      CHECK(m.num_vertices() - m.num_faces() + m.num_cells() == 1);
    }
    CHECK(area_sum(m) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(m.shape_regularity < 20.0);
  }
}

TEST_CASE("uniform refinement quadruples the cell count")
{
  CHECK(uniform_refine(triangle_grid(2)).num_cells() == 4 * triangle_grid(2).num_cells());
  CHECK(uniform_refine(rectangle_grid(2, 3)).num_cells() == 24);
}
