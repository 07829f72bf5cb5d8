#include "adaptfv/io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "adaptfv/errors.hpp"

namespace adaptfv
{

namespace
{

[[noreturn]] void parse_error(int line, const std::string &what)
{
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

Mesh read_mesh(std::istream &in, bool polytopal)
{
  std::string text;
  int line_no = 0;
  int nv = -1, nc = -1;
  std::vector<Vec2> vertices;
  std::vector<std::vector<int>> loops;
  while (std::getline(in, text))
  {
    line_no++;
    const auto hash = text.find('#');
    if (hash != std::string::npos)
    {
      text.erase(hash);
    }
    std::istringstream ls(text);
    std::string tag;
    if (!(ls >> tag))
    {
      continue;
    }
    if (tag == "mesh2d")
    {
      if (!(ls >> nv >> nc) || nv < 0 || nc < 0)
      {
        parse_error(line_no, "expected `mesh2d <nv> <nc>`");
      }
    }
    else if (nv < 0)
    {
      parse_error(line_no, "missing `mesh2d` header");
    }
    else if (tag == "v")
    {
      double x, y;
      if (!(ls >> x >> y))
      {
        parse_error(line_no, "expected `v <x> <y>`");
      }
      vertices.emplace_back(x, y);
    }
    else if (tag == "c")
    {
      int k;
      if (!(ls >> k) || k < 3)
      {
        parse_error(line_no, "expected `c <k> ...` with k >= 3");
      }
      std::vector<int> loop(k);
      for (int &v : loop)
      {
        if (!(ls >> v))
        {
          parse_error(line_no, "cell lists fewer vertices than announced");
        }
        if (v < 0 || v >= nv)
        {
          parse_error(line_no, "vertex index " + std::to_string(v) + " out of range");
        }
      }
      loops.push_back(std::move(loop));
    }
    else
    {
      parse_error(line_no, "unknown record `" + tag + "`");
    }
    std::string extra;
    if (ls >> extra)
    {
      parse_error(line_no, "trailing token `" + extra + "`");
    }
  }
  if (nv < 0)
  {
    throw Error(ErrorCode::ParseError, "empty mesh file");
  }
  if (static_cast<int>(vertices.size()) != nv || static_cast<int>(loops.size()) != nc)
  {
    throw Error(ErrorCode::ParseError, "header announces " + std::to_string(nv) + " vertices and " +
                                           std::to_string(nc) + " cells, found " +
                                           std::to_string(vertices.size()) + " and " +
                                           std::to_string(loops.size()));
  }
  bool all_triangles = true;
  for (const auto &l : loops)
  {
    all_triangles = all_triangles && l.size() == 3;
  }
  if (all_triangles && !polytopal)
  {
    std::vector<std::array<int, 3>> tris;
    for (const auto &l : loops)
    {
      tris.push_back({l[0], l[1], l[2]});
    }
    return build_simplicial(vertices, tris);
  }
  return build_polytopal(vertices, loops);
}

Mesh read_mesh_file(const std::string &path, bool polytopal)
{
  std::ifstream in(path);
  if (!in)
  {
    throw Error(ErrorCode::ParseError, "cannot open mesh file '" + path + "'");
  }
  return read_mesh(in, polytopal);
}

void write_mesh(std::ostream &out, const Mesh &mesh)
{
  out << "mesh2d " << mesh.num_vertices() << ' ' << mesh.num_cells() << '\n';
  for (const Vec2 &v : mesh.vertices)
  {
    out << "v " << format_real(v.x()) << ' ' << format_real(v.y()) << '\n';
  }
  for (const auto &loop : mesh.cells)
  {
    out << "c " << loop.size();
    for (int v : loop)
    {
      out << ' ' << v;
    }
    out << '\n';
  }
}

std::string format_real(double x)
{
  std::ostringstream s;
  s << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
  return s.str();
}

void write_study_csv(std::ostream &out, const std::vector<StudyRow> &rows)
{
  out << "level,ndof,ncells,error,estimate,eta_sp,eta_lin,eta_alg,eta_rem,i_eff\n";
  for (const StudyRow &r : rows)
  {
    out << r.level << ',' << r.ndof << ',' << r.ncells << ',' << format_real(r.error) << ','
        << format_real(r.estimate) << ',' << format_real(r.eta_sp) << ',' << format_real(r.eta_lin) << ','
        << format_real(r.eta_alg) << ',' << format_real(r.eta_rem) << ',' << format_real(r.i_eff) << '\n';
  }
}

void write_cell_matrices_csv(std::ostream &out, const CellLocalMatrices &m)
{
  auto block = [&out](const char *name, const Eigen::MatrixXd &a) {
    for (int i = 0; i < a.rows(); i++)
    {
      out << name << ',' << i;
      for (int j = 0; j < a.cols(); j++)
      {
        out << ',' << format_real(a(i, j));
      }
      out << '\n';
    }
  };
  block("a_mfe", m.a_mfe);
  block("s_fe", m.s_fe);
  block("m_fe", m.m_fe);
}

void write_vtk(std::ostream &out, const GlobalSubmesh &gsm, const RT0Field &u,
               const Eigen::VectorXd &point_potential)
{
  out << "# vtk DataFile Version 3.0\nadaptfv\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << gsm.num_points() << " double\n";
  for (const Vec2 &p : gsm.points)
  {
    out << format_real(p.x()) << ' ' << format_real(p.y()) << " 0\n";
  }
  const int nt = gsm.num_triangles();
  out << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const auto &t : gsm.triangles)
  {
    out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
  out << "CELL_TYPES " << nt << '\n';
  for (int t = 0; t < nt; t++)
  {
    out << "5\n";
  }
  out << "CELL_DATA " << nt << "\nSCALARS flux_magnitude double 1\nLOOKUP_TABLE default\n";
  for (int t = 0; t < nt; t++)
  {
    const int K = gsm.parent[t];
    const Triangle tri = gsm.triangle(t);
    const Vec2 c = (tri[0] + tri[1] + tri[2]) / 3.0;
    out << format_real(u.cells[K][t - gsm.first_triangle[K]](c).norm()) << '\n';
  }
  out << "SCALARS parent_cell int 1\nLOOKUP_TABLE default\n";
  for (int t = 0; t < nt; t++)
  {
    out << gsm.parent[t] << '\n';
  }
  if (point_potential.size() == gsm.num_points())
  {
    out << "POINT_DATA " << gsm.num_points() << "\nSCALARS potential double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < gsm.num_points(); i++)
    {
      out << format_real(point_potential[i]) << '\n';
    }
  }
}

}  // namespace adaptfv
