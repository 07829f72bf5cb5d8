#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "adaptfv/localmat.hpp"
#include "adaptfv/mesh.hpp"
#include "adaptfv/scheme.hpp"

namespace adaptfv
{

// Union of the cell submeshes: the mesh itself for simplicial meshes, the
// barycentric fans otherwise. Points are mesh vertices followed by cell
// centers of fanned cells.
struct GlobalSubmesh
{
  std::vector<Vec2> points;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> parent;
  std::vector<int> first_triangle;  // per cell, triangles are contiguous
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> triangle_edges;  // edge opposite each vertex
  std::vector<char> boundary_point;
  std::vector<char> boundary_edge;

  int num_points() const { return static_cast<int>(points.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  Triangle triangle(int t) const
  {
    return {points[triangles[t][0]], points[triangles[t][1]], points[triangles[t][2]]};
  }
};

GlobalSubmesh build_global_submesh(const Mesh &mesh);

// Per cell, one RT0 piece per subtriangle in submesh order.
struct RT0Field
{
  std::vector<std::vector<RT0Local>> cells;

  int num_cells() const { return static_cast<int>(cells.size()); }
};

RT0Field lift_flux_simplicial(const Mesh &mesh, const FaceFluxVector &u);

struct LocalNeumannSolution
{
  std::vector<RT0Local> field;
  std::vector<double> potential;  // per subtriangle, mean P_K over the cell
  Eigen::VectorXd spoke_fluxes;
};

// Minimal-energy RT0 field on the submesh with the given outward fluxes and
// constant divergence.
LocalNeumannSolution solve_local_neumann(const Submesh &s, const Eigen::VectorXd &u_ext,
                                         double p_mean, const Eigen::Matrix2d &inverse_diffusion);

// Liftings of every cell; triangles of a simplicial mesh reduce to the
// explicit RT0 lifting.
RT0Field lift_flux(const Mesh &mesh, const FaceFluxVector &u, const std::vector<double> &k);

// Six Lagrange values per triangle: vertices, then midpoints of edges
// (0,1), (1,2), (2,0).
struct P2Potential
{
  std::vector<std::array<double, 6>> values;
};

double p2_value(const Triangle &t, const std::array<double, 6> &v, const Vec2 &x);
Vec2 p2_gradient(const Triangle &t, const std::array<double, 6> &v, const Vec2 &x);

// -k grad p = u on every subtriangle, with the given mean per subtriangle.
P2Potential postprocess_potential(const GlobalSubmesh &gsm, const RT0Field &u,
                                  const std::vector<double> &means, const std::vector<double> &k);

// Means P_K repeated over the subtriangles of each cell.
std::vector<double> repeat_cell_values(const GlobalSubmesh &gsm, const Eigen::VectorXd &p);

// Continuous P2 by averaging nodal values; boundary nodes take g (or 0).
P2Potential average_p2(const GlobalSubmesh &gsm, const P2Potential &p, const ScalarFunction &g = {});

// Values at submesh vertices: mesh vertices and cell centers.
struct PointValues
{
  Eigen::VectorXd vertex;
  Eigen::VectorXd center;
};

PointValues point_values_avg(const Mesh &mesh, const CellPotentialVector &p, const ScalarFunction &g = {});
// Throws MultipliersUnavailable when `multipliers` is empty.
PointValues point_values_hyb(const Mesh &mesh, const Eigen::VectorXd &multipliers,
                             const CellPotentialVector &p, const ScalarFunction &g = {});

// Z_K in submesh point order and Z_K^ext per exterior subface.
Eigen::VectorXd gather_points(const Mesh &mesh, int K, const PointValues &z);
Eigen::VectorXd gather_faces(const Mesh &mesh, int K, const PointValues &z);

std::vector<double> redistribute_flux(double u, const std::vector<double> &lengths);

P2Potential reconstruct_p2_polytopal(const Mesh &mesh, const GlobalSubmesh &gsm,
                                     const std::vector<LocalNeumannSolution> &local,
                                     const std::vector<double> &k, const ScalarFunction &g = {});

}  // namespace adaptfv
