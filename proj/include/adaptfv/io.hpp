#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adaptfv/adaptive.hpp"
#include "adaptfv/localmat.hpp"
#include "adaptfv/mesh.hpp"
#include "adaptfv/reconstruct.hpp"

namespace adaptfv
{

// Text format: `mesh2d <nv> <nc>`, `v <x> <y>` lines, `c <k> <i1> ... <ik>`
// lines. All cells triangles gives a simplicial mesh unless `polytopal`.
Mesh read_mesh(std::istream &in, bool polytopal = false);
Mesh read_mesh_file(const std::string &path, bool polytopal = false);
void write_mesh(std::ostream &out, const Mesh &mesh);

std::string format_real(double x);

void write_study_csv(std::ostream &out, const std::vector<StudyRow> &rows);

// Row-major blocks with 17 significant digits.
void write_cell_matrices_csv(std::ostream &out, const CellLocalMatrices &m);

// Legacy ASCII unstructured grid over the global submesh; flux magnitude at
// subtriangle centroids as cell data, potential at points.
void write_vtk(std::ostream &out, const GlobalSubmesh &gsm, const RT0Field &u,
               const Eigen::VectorXd &point_potential);

}  // namespace adaptfv
