#include <doctest.h>

#include <sstream>

#include "adaptfv/io.hpp"
#include "support.hpp"

using namespace adaptfv;
using adaptfv::test::error_code;

namespace
{

std::optional<ErrorCode> parse(const std::string &text)
{
  return error_code([&] {
    std::istringstream in(text);
    read_mesh(in);
  });
}

}  // namespace

TEST_CASE("mesh text round trip")
{
  for (const Mesh &m : {triangle_grid(4), rectangle_grid(2, 3, 0.0, 1.0 / 3.0, 0.0, 0.7)})
  {
    std::ostringstream out;
    write_mesh(out, m);
    std::istringstream in(out.str());
    const Mesh back = read_mesh(in);
    CHECK(back.kind == m.kind);
    CHECK(back.vertices == m.vertices);
    CHECK(back.cells == m.cells);
  }
}

TEST_CASE("triangle-only files may be read as polytopal")
{
  const std::string text = "mesh2d 3 1\nv 0 0\nv 1 0\nv 0 1\nc 3 0 1 2\n";
  std::istringstream a(text), b(text);
  CHECK(read_mesh(a).kind == MeshKind::simplicial);
  CHECK(read_mesh(b, true).kind == MeshKind::polytopal);
}

TEST_CASE("polygonal mesh file")
{
  const Mesh m = read_mesh_file(ADAPTFV_TEST_DATA "/poly.m2d");
  CHECK(m.kind == MeshKind::polytopal);
  CHECK(m.num_cells() == 2);
  CHECK(m.total_area() == doctest::Approx(1.0));
  CHECK(m.cells[1].size() == 5);
}

TEST_CASE("malformed mesh files")
{
  CHECK(parse("") == ErrorCode::ParseError);
  CHECK(parse("v 0 0\n") == ErrorCode::ParseError);
  CHECK(parse("mesh2d 3 1\nv 0 0\nv 1 0\nv 0 1\nc 3 0 1 7\n") == ErrorCode::ParseError);
  CHECK(parse("mesh2d 3 1\nv 0 0\nv 1 0\nv 0 1\nc 3 0 1 2 9\n") == ErrorCode::ParseError);
  CHECK(parse("mesh2d 3 2\nv 0 0\nv 1 0\nv 0 1\nc 3 0 1 2\n") == ErrorCode::ParseError);
  CHECK(parse("mesh2d 3 1\nv 0 0\nv 1 x\nv 0 1\nc 3 0 1 2\n") == ErrorCode::ParseError);
  try
  {
    std::istringstream in("mesh2d 1 0\n# comment\nw 1 2\n");
    read_mesh(in);
    FAIL("expected a parse error");
  }
  catch (const Error &e)
  {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("study CSV")
{
  StudyRow row;
  row.level = 2;
  row.ndof = 10;
  row.ncells = 8;
  row.error = 0.1;
  row.estimate = 1.0 / 3.0;
  std::ostringstream out;
  write_study_csv(out, {row});
  const std::string s = out.str();
  CHECK(s.rfind("level,ndof,ncells,error,estimate,eta_sp,eta_lin,eta_alg,eta_rem,i_eff\n", 0) == 0);
  CHECK(s.find("2,10,8,0.10000000000000001,0.33333333333333331,") != std::string::npos);
  CHECK(std::stod(format_real(1.0 / 7.0)) == 1.0 / 7.0);
}

TEST_CASE("cell matrices CSV")
{
  const Mesh m = rectangle_grid(1, 1);
  const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
  std::ostringstream out;
  write_cell_matrices_csv(out, cell_matrices(m.submeshes[0], id, id));
  const std::string s = out.str();
  CHECK(s.rfind("a_mfe,0,", 0) == 0);
  CHECK(s.find("s_fe,4,") != std::string::npos);
  CHECK(s.find("m_fe,4,") != std::string::npos);
}

TEST_CASE("legacy VTK output")
{
  const Mesh m = rectangle_grid(2, 1);
  const GlobalSubmesh g = build_global_submesh(m);
  const RT0Field u = lift_flux(m, Eigen::VectorXd::Ones(m.num_faces()), {});
  std::ostringstream out;
  write_vtk(out, g, u, Eigen::VectorXd::Zero(g.num_points()));
  const std::string s = out.str();
  CHECK(s.rfind("# vtk DataFile Version 3.0\n", 0) == 0);
  CHECK(s.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
  CHECK(s.find("POINTS 8 double") != std::string::npos);
  CHECK(s.find("CELLS 8 32") != std::string::npos);
  CHECK(s.find("CELL_DATA 8\nSCALARS flux_magnitude") != std::string::npos);
  CHECK(s.find("SCALARS parent_cell int 1") != std::string::npos);
  CHECK(s.find("POINT_DATA 8\nSCALARS potential") != std::string::npos);
}
