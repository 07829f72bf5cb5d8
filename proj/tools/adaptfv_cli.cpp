#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adaptfv/acceptance.hpp"
#include "adaptfv/adaptive.hpp"
#include "adaptfv/errors.hpp"
#include "adaptfv/io.hpp"
#include "adaptfv/parallel.hpp"
#include "adaptfv/problems.hpp"

using namespace adaptfv;

namespace
{

struct RunConfig
{
  std::string problem = "peak";
  std::string mesh_file;
  std::string mesh_type = "tri";
  int n = 8;
  bool polytopal = false;
  std::string scheme = "tpfa";
  std::string potential = "p2";
  std::string collocation;
  std::string linearization = "newton";
  double lower = 1.0;
  double upper = 10.0;
  bool inexact = false;
  AdaptiveConfig adaptive;
  bool standard_linearization = false;
  bool standard_algebraic = false;
  int levels = 4;
  double delta_ref = 0.7;
  double delta_deref = 0.2;
  bool derefine = false;
  double target_estimate = 0.0;
  std::string out_dir;
  bool vtk = false;
  int dump_cell = -1;
  std::vector<int> criteria;
};

Problem load_problem(const RunConfig &rc)
{
  return make_problem(rc.problem, rc.lower, rc.upper);
}

Mesh load_mesh(const RunConfig &rc, const Problem &p, int n)
{
  if (!rc.mesh_file.empty())
  {
    return read_mesh_file(rc.mesh_file, rc.polytopal);
  }
  return rc.mesh_type == "rect" ? p.rectangle_mesh(n) : p.triangle_mesh(n);
}

LinearOptions linear_options(const RunConfig &rc)
{
  static const std::map<std::string, SchemeKind> schemes{{"tpfa", SchemeKind::tpfa}, {"hmfe", SchemeKind::hmfe}};
  static const std::map<std::string, PotentialKind> potentials{
      {"p2", PotentialKind::p2}, {"avg", PotentialKind::avg}, {"hyb", PotentialKind::hyb}};
  LinearOptions o;
  o.scheme = schemes.at(rc.scheme);
  o.potential = potentials.at(rc.potential);
  o.ignore_oscillation = rc.adaptive.ignore_oscillation;
  if (!rc.collocation.empty())
  {
    o.collocation = rc.collocation == "centroid" ? Collocation::centroid : Collocation::circumcenter;
  }
  return o;
}

AdaptiveConfig adaptive_config(const RunConfig &rc)
{
  AdaptiveConfig c = rc.adaptive;
  c.method = rc.linearization == "fixed_point" ? Linearization::fixed_point : Linearization::newton;
  c.adaptive_linearization = !rc.standard_linearization;
  c.adaptive_algebraic = !rc.standard_algebraic;
  c.collocation = linear_options(rc).collocation;
  return c;
}

std::filesystem::path output_path(const RunConfig &rc, const std::string &name)
{
  const std::filesystem::path dir = rc.out_dir.empty() ? "." : rc.out_dir;
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::ofstream open_output(const std::filesystem::path &path)
{
  std::ofstream out(path);
  if (!out)
  {
    throw Error(ErrorCode::InvalidInput, "cannot write '" + path.string() + "'");
  }
  return out;
}

// Potential at global submesh points: mesh vertices, then centers of fanned cells.
Eigen::VectorXd submesh_point_values(const Mesh &mesh, const PointValues &z)
{
  std::vector<double> values(z.vertex.data(), z.vertex.data() + z.vertex.size());
  for (int K = 0; K < mesh.num_cells(); K++)
  {
    if (mesh.submeshes[K].fan)
    {
      values.push_back(z.center[K]);
    }
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void emit_vtk(const std::filesystem::path &path, const Mesh &mesh, const RT0Field &u, const PointValues &z)
{
  std::ofstream out = open_output(path);
  write_vtk(out, build_global_submesh(mesh), u, submesh_point_values(mesh, z));
}

PointValues linear_point_values(const Mesh &mesh, const Problem &p, const LinearRun &run, SchemeKind scheme)
{
  if (scheme == SchemeKind::hmfe)
  {
    return point_values_hyb(mesh, run.multipliers, run.p, p.boundary());
  }
  return point_values_avg(mesh, run.p, p.boundary());
}

void print_summary(const StudyRow &row)
{
  std::cout << "ncells = " << row.ncells << "\nndof = " << row.ndof << "\nerror = " << format_real(row.error)
            << "\nestimate = " << format_real(row.estimate) << "\ni_eff = " << format_real(row.i_eff) << '\n';
}

int cmd_solve(const RunConfig &rc)
{
  const Problem p = load_problem(rc);
  const Mesh mesh = load_mesh(rc, p, rc.n);
  StudyRow row;
  if (p.nonlinear || rc.inexact)
  {
    const NonlinearRun run = adaptive_inexact_solve(p, mesh, adaptive_config(rc));
    row = make_row(0, mesh, mesh.num_cells(), run.estimate, run.total_error);
    row.work = run.algebraic_steps;
    print_summary(row);
    std::cout << "linearization_steps = " << run.linearization_steps
              << "\nalgebraic_steps = " << run.algebraic_steps << '\n';
    if (rc.vtk)
    {
      emit_vtk(output_path(rc, "solve.vtk"), mesh, run.lifting, point_values_avg(mesh, run.p, p.boundary()));
    }
  }
  else
  {
    const LinearOptions o = linear_options(rc);
    const LinearRun run = solve_and_estimate(p, mesh, o);
    row = make_row(0, mesh, run.ndof, run.estimate, run.total_error);
    print_summary(row);
    if (rc.vtk)
    {
      emit_vtk(output_path(rc, "solve.vtk"), mesh, run.lifting, linear_point_values(mesh, p, run, o.scheme));
    }
  }
  std::ofstream csv = open_output(output_path(rc, "solve.csv"));
  write_study_csv(csv, {row});
  if (rc.dump_cell >= 0)
  {
    if (rc.dump_cell >= mesh.num_cells())
    {
      throw Error(ErrorCode::InvalidInput, "cell " + std::to_string(rc.dump_cell) + " out of range");
    }
    const double k = p.nonlinear ? 1.0 : p.k;
    const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
    std::ofstream dump = open_output(output_path(rc, "cell_" + std::to_string(rc.dump_cell) + "_matrices.csv"));
    write_cell_matrices_csv(dump, cell_matrices(mesh.submeshes[rc.dump_cell], id / k, id * k));
  }
  return 0;
}

int cmd_study(const RunConfig &rc)
{
  const Problem p = load_problem(rc);
  std::vector<Mesh> meshes;
  if (!rc.mesh_file.empty())
  {
    meshes.push_back(load_mesh(rc, p, rc.n));
    while (static_cast<int>(meshes.size()) < rc.levels)
    {
      meshes.push_back(uniform_refine(meshes.back()));
    }
  }
  else
  {
    meshes = uniform_family(p, rc.mesh_type != "rect", rc.n, rc.levels);
  }
  StudyOptions so;
  so.linear = linear_options(rc);
  so.inexact = rc.inexact;
  so.adaptive = adaptive_config(rc);
  const std::vector<StudyRow> rows = convergence_study(p, meshes, so);
  write_study_csv(std::cout, rows);
  if (!rc.out_dir.empty())
  {
    std::ofstream csv = open_output(output_path(rc, "study.csv"));
    write_study_csv(csv, rows);
  }
  return 0;
}

int cmd_adapt(const RunConfig &rc)
{
  const Problem p = load_problem(rc);
  AmrOptions o;
  o.linear = linear_options(rc);
  o.delta_ref = rc.delta_ref;
  o.delta_deref = rc.delta_deref;
  o.derefine = rc.derefine;
  o.levels = rc.levels;
  o.target_estimate = rc.target_estimate;
  if (rc.vtk)
  {
    o.on_level = [&](int level, const Mesh &mesh, const LinearRun &run) {
      emit_vtk(output_path(rc, "adapt_" + std::to_string(level) + ".vtk"), mesh, run.lifting,
               linear_point_values(mesh, p, run, o.linear.scheme));
    };
  }
  Mesh final_mesh;
  const std::vector<StudyRow> rows = amr_loop(p, load_mesh(rc, p, rc.n), o, &final_mesh);
  write_study_csv(std::cout, rows);
  std::ofstream csv = open_output(output_path(rc, "adapt.csv"));
  write_study_csv(csv, rows);
  std::ofstream m2d = open_output(output_path(rc, "adapt_final.m2d"));
  write_mesh(m2d, final_mesh);
  return 0;
}

int cmd_verify(const RunConfig &rc)
{
  std::vector<int> ids = rc.criteria;
  if (ids.empty())
  {
    for (int id = 1; id <= num_criteria; id++)
    {
      ids.push_back(id);
    }
  }
  bool all = true;
  for (int id : ids)
  {
    const CriterionResult r = run_criterion(id);
    std::cout << format_result(r) << std::endl;
    all = all && r.pass;
  }
  return all ? 0 : 2;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Finite-volume diffusion solver with guaranteed a posteriori error estimates"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Plain-text `key = value` file; command-line flags take precedence");

  RunConfig rc;
  AdaptiveConfig &ac = rc.adaptive;
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads for cell-parallel stages (default ADAPTFV_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  app.add_option("--problem", rc.problem, "Catalog problem")->check(CLI::IsMember(catalog()));
  app.add_option("--mesh", rc.mesh_file, "Mesh file in the mesh2d text format")->check(CLI::ExistingFile);
  app.add_option("--mesh-type", rc.mesh_type, "Generator when no mesh file is given")
      ->check(CLI::IsMember({"tri", "rect"}));
  app.add_option("--n", rc.n, "Generator resolution (cells per unit length)")->check(CLI::PositiveNumber);
  app.add_flag("--polytopal", rc.polytopal, "Treat triangle-only mesh files as polytopal");
  app.add_option("--scheme", rc.scheme, "Discretization")->check(CLI::IsMember({"tpfa", "hmfe"}));
  app.add_option("--potential", rc.potential, "Potential reconstruction behind the estimate")
      ->check(CLI::IsMember({"p2", "avg", "hyb"}));
  app.add_option("--collocation", rc.collocation, "Two-point cell points")
      ->check(CLI::IsMember({"circumcenter", "centroid"}));
  app.add_option("--linearization", rc.linearization)->check(CLI::IsMember({"newton", "fixed_point"}));
  app.add_option("--lower", rc.lower, "Nonlinear law lower bound c");
  app.add_option("--upper", rc.upper, "Nonlinear law upper bound C");
  app.add_flag("--inexact", rc.inexact, "Route linear problems through the iterative adaptive solver");
  app.add_option("--gamma-lin", ac.gamma_lin);
  app.add_option("--gamma-alg", ac.gamma_alg);
  app.add_option("--cadence", ac.cadence, "Algebraic steps between estimator evaluations")
      ->check(CLI::PositiveNumber);
  app.add_option("--j-initial", ac.j_initial)->check(CLI::PositiveNumber);
  app.add_option("--j-max", ac.j_max)->check(CLI::PositiveNumber);
  app.add_option("--max-linearization", ac.max_linearization)->check(CLI::PositiveNumber);
  app.add_option("--max-algebraic", ac.max_algebraic)->check(CLI::PositiveNumber);
  app.add_option("--standard-lin-tol", ac.standard_lin_tol);
  app.add_option("--standard-alg-tol", ac.standard_alg_tol);
  app.add_flag("--standard-linearization", rc.standard_linearization, "Stop on the residual ratio instead");
  app.add_flag("--standard-algebraic", rc.standard_algebraic, "Stop on the relative algebraic residual instead");
  app.add_flag("--exact-algebraic", ac.exact_algebraic, "Solve each linearized system directly");
  app.add_flag("--jacobi", ac.jacobi, "Jacobi-preconditioned CG");
  app.add_option("--friedrichs", ac.friedrichs);
  app.add_flag("--ignore-oscillation", ac.ignore_oscillation, "Drop data oscillation terms");
  app.add_option("--out", rc.out_dir, "Output directory (default: current directory)");
  app.add_flag("--vtk", rc.vtk, "Write legacy VTK snapshots");

  CLI::App *solve = app.add_subcommand("solve", "Solve once and estimate the error");
  solve->add_option("--dump-cell", rc.dump_cell, "Write local matrices of this cell as CSV");
  CLI::App *study = app.add_subcommand("study", "Uniform-refinement convergence study");
  study->add_option("--levels", rc.levels)->check(CLI::PositiveNumber);
  CLI::App *adapt = app.add_subcommand("adapt", "Adaptive mesh refinement loop");
  adapt->add_option("--levels", rc.levels)->check(CLI::PositiveNumber);
  adapt->add_option("--delta-ref", rc.delta_ref)->check(CLI::Range(0.0, 1.0));
  adapt->add_option("--delta-deref", rc.delta_deref)->check(CLI::Range(0.0, 1.0));
  adapt->add_flag("--derefine", rc.derefine, "Report derefinement candidates");
  adapt->add_option("--target-estimate", rc.target_estimate);
  CLI::App *verify = app.add_subcommand("verify", "Run the acceptance criteria");
  verify->add_option("--criterion", rc.criteria, "Criterion id (repeatable; default all)")
      ->check(CLI::Range(1, num_criteria));
  for (CLI::App *sub : {solve, study, adapt, verify})
  {
    sub->fallthrough();
  }

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    return app.exit(e) == 0 ? 0 : 1;
  }
  try
  {
    if (threads > 0)
    {
      set_num_threads(threads);
    }
    if (adapt->parsed() && app.count("--scheme") == 0)
    {
      rc.scheme = "hmfe";
    }
    if (solve->parsed())
    {
      return cmd_solve(rc);
    }
    if (study->parsed())
    {
      return cmd_study(rc);
    }
    if (adapt->parsed())
    {
      return cmd_adapt(rc);
    }
    return cmd_verify(rc);
  }
  catch (const std::exception &e)
  {
    std::cerr << "adaptfv: " << e.what() << '\n';
    return 1;
  }
}
