#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "adaptfv/mesh.hpp"

namespace adaptfv
{

using Triangle = std::array<Vec2, 3>;

double signed_area(const Triangle &t);

// Barycentric rule on a triangle; weights sum to one.
struct QuadRule
{
  std::vector<Eigen::Vector3d> points;
  std::vector<double> weights;
  int degree = 0;
};

// Smallest stored rule exact to `degree`: 3-point edge-midpoint rule up to 2,
// 7-point rule up to 5.
const QuadRule &quad_rule(int degree);

Vec2 map_point(const Triangle &t, const Eigen::Vector3d &bary);

double integrate(const Triangle &t, const std::function<double(const Vec2 &)> &f, int degree);
double integrate(const Submesh &s, const std::function<double(const Vec2 &)> &f, int degree);

// v(x) = a + c x on one triangle.
struct RT0Local
{
  Vec2 a = Vec2::Zero();
  double c = 0.0;

  Vec2 operator()(const Vec2 &x) const { return a + c * x; }
  double divergence() const { return 2.0 * c; }
};

// Basis function with unit outward flux through the face opposite vertex
// `face` and zero flux through the others.
RT0Local rt0_basis(const Triangle &t, int face);

// Field with the given outward fluxes; entry m belongs to the face opposite
// vertex m.
RT0Local rt0_from_fluxes(const Triangle &t, const Eigen::Vector3d &flux);

// Normal flux of v through the edge (p, q), normal to the right of p -> q.
double edge_flux(const RT0Local &v, const Vec2 &p, const Vec2 &q);

// Blocks of the local mixed system on the submesh of one cell. Unknowns are
// exterior subface fluxes (outward) and interior spoke fluxes (oriented from
// subtriangle j-1 into subtriangle j). B0 rows test against the n-1 zero-mean
// indicator combinations q_l.
struct LocalBlocks
{
  Eigen::MatrixXd a_int_int;
  Eigen::MatrixXd a_int_ext;
  Eigen::MatrixXd a_ext_ext;
  Eigen::MatrixXd b0_int;
  Eigen::MatrixXd b0_ext;
};

// Subface flux maps of every subtriangle: column d of the result is the vector
// of outward fluxes (opposite vertices 0,1,2) that degree of freedom d induces.
// Degrees of freedom are exterior subfaces first, then spokes.
std::vector<Eigen::Matrix3Xd> subtriangle_flux_maps(const Submesh &s);

LocalBlocks assemble_blocks(const Submesh &s, const Eigen::Matrix2d &inverse_diffusion);

// Schur complement of the interior saddle block.
Eigen::MatrixXd schur_a_mfe(const LocalBlocks &blocks);

// Interior unknowns (spoke fluxes, then multipliers) of the minimal-energy
// field for each unit exterior flux; one column per exterior subface.
Eigen::MatrixXd local_response(const LocalBlocks &blocks);

// Subtriangle fluxes for exterior fluxes u and interior unknowns x.
std::vector<RT0Local> assemble_field(const Submesh &s, const Eigen::VectorXd &u_ext,
                                     const Eigen::VectorXd &spokes);

Eigen::MatrixXd fe_stiffness(const Submesh &s, const Eigen::Matrix2d &diffusion);
Eigen::MatrixXd fe_mass(const Submesh &s);

struct CellLocalMatrices
{
  Eigen::MatrixXd a_mfe;
  Eigen::MatrixXd s_fe;
  Eigen::MatrixXd m_fe;
};

CellLocalMatrices cell_matrices(const Submesh &s, const Eigen::Matrix2d &inverse_diffusion,
                                const Eigen::Matrix2d &diffusion);

// Per-cell matrices with a scalar diffusion k (weights 1/k and k); cell-parallel.
std::vector<CellLocalMatrices> all_cell_matrices(const Mesh &mesh, const std::vector<double> &k);

void check_spd(const Eigen::Matrix2d &w);

}  // namespace adaptfv
