#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace adaptfv
{

using Vec2 = Eigen::Vector2d;

enum class MeshKind
{
  simplicial,
  polytopal
};

// Mesh face. The normal points out of the left cell; the left cell is the one
// with the lower index, so the orientation is fixed globally.
struct Face
{
  int v0 = -1, v1 = -1;
  int left = -1;
  int right = -1;  // -1 on the boundary
  Vec2 normal = Vec2::Zero();
  double length = 0.0;
  Vec2 midpoint = Vec2::Zero();

  bool boundary() const { return right < 0; }
};

// Virtual simplicial submesh of one cell. Either the cell itself (triangles of
// a simplicial mesh) or the fan from the cell barycenter. Local points are the
// cell vertices in loop order followed by the barycenter for a fan. Exterior
// subface i joins points i and i+1 and coincides with cell face i. Spoke j
// joins the barycenter with point j and separates subtriangles j-1 and j.
struct Submesh
{
  bool fan = false;
  Vec2 center = Vec2::Zero();
  std::vector<Vec2> points;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<std::array<int, 2>> exterior;
  std::vector<std::array<int, 2>> spokes;
  std::vector<double> areas;

  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_points() const { return static_cast<int>(points.size()); }
  int num_exterior() const { return static_cast<int>(exterior.size()); }
  int num_spokes() const { return static_cast<int>(spokes.size()); }
  std::array<Vec2, 3> triangle(int t) const
  {
    return {points[triangles[t][0]], points[triangles[t][1]], points[triangles[t][2]]};
  }
};

struct Mesh
{
  MeshKind kind = MeshKind::polytopal;
  std::vector<Vec2> vertices;
  std::vector<std::vector<int>> cells;        // counter-clockwise vertex loops
  std::vector<Face> faces;
  std::vector<std::vector<int>> cell_faces;   // face i joins loop[i], loop[i+1]
  std::vector<std::vector<int>> face_signs;   // n_K . n_sigma, +1 or -1
  std::vector<double> areas;
  std::vector<double> diameters;
  std::vector<Vec2> centroids;
  std::vector<Submesh> submeshes;
  std::vector<char> boundary_vertex;
  std::vector<std::vector<int>> vertex_cells;
  std::vector<std::vector<int>> vertex_faces;
  // Simplicial meshes: local index of the newest vertex; the refinement edge
  // is opposite to it.
  std::vector<int> newest_vertex;
  std::vector<int> levels;
  double shape_regularity = 0.0;  // max h_K / inradius_K

  int num_cells() const { return static_cast<int>(cells.size()); }
  int num_faces() const { return static_cast<int>(faces.size()); }
  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_cell_faces(int K) const { return static_cast<int>(cell_faces[K].size()); }
  double total_area() const;
  double domain_diameter() const;
  bool is_triangle(int K) const { return cells[K].size() == 3; }
};

Mesh build_simplicial(const std::vector<Vec2> &vertices,
                      const std::vector<std::array<int, 3>> &triangles);

Mesh build_polytopal(const std::vector<Vec2> &vertices,
                     const std::vector<std::vector<int>> &loops);

// Rebuilds topology and geometry from raw loops, keeping the kind of `like`.
Mesh rebuild_like(const Mesh &like, const std::vector<Vec2> &vertices,
                  const std::vector<std::vector<int>> &loops,
                  const std::vector<int> &newest, const std::vector<int> &levels);

enum class Collocation
{
  circumcenter,
  centroid
};

struct AdmissibilityData
{
  std::vector<Vec2> points;           // x_K
  std::vector<double> distance;       // d_{K,L} (interior) or d_{K,sigma} (boundary)
  std::vector<Vec2> boundary_points;  // x_{K,sigma}, boundary faces only
};

AdmissibilityData admissibility(const Mesh &mesh, Collocation collocation,
                                double rel_tol = 1e-10);

// Default collocation: circumcenters on simplicial meshes, centroids otherwise.
AdmissibilityData admissibility(const Mesh &mesh);

Vec2 circumcenter(const Vec2 &a, const Vec2 &b, const Vec2 &c);

// Newest-vertex bisection with closure on simplicial meshes, quadrisection
// with the one-hanging-node rule on polytopal meshes.
Mesh refine(const Mesh &mesh, const std::vector<int> &marked, int max_depth = 64);

Mesh uniform_refine(const Mesh &mesh);

// Generators. Triangle grids use the offset-row pattern whose triangles are
// acute or right with circumcenters strictly inside the boundary faces, so
// circumcenter two-point fluxes are admissible. n must be even.
Mesh triangle_grid(int n, double x0 = 0.0, double x1 = 1.0, double y0 = 0.0, double y1 = 1.0);
Mesh rectangle_grid(int nx, int ny, double x0 = 0.0, double x1 = 1.0, double y0 = 0.0,
                    double y1 = 1.0);
// L-shaped domain (-1,1)^2 minus (-1,0]^2, n cells per unit length (even).
Mesh lshape_triangle_mesh(int n);
Mesh lshape_rectangle_mesh(int n);
// Right triangles from a square grid split along one diagonal; not admissible
// for circumcenter two-point fluxes.
Mesh diagonal_triangle_grid(int n, double x0 = 0.0, double x1 = 1.0, double y0 = 0.0,
                            double y1 = 1.0);

}  // namespace adaptfv
