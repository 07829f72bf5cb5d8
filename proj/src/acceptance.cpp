#include "adaptfv/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "adaptfv/adaptive.hpp"
#include "adaptfv/errors.hpp"
#include "adaptfv/estimate.hpp"
#include "adaptfv/localmat.hpp"
#include "adaptfv/mesh.hpp"
#include "adaptfv/nonlinear.hpp"
#include "adaptfv/problems.hpp"
#include "adaptfv/reconstruct.hpp"
#include "adaptfv/scheme.hpp"
#include "adaptfv/sparse_linalg.hpp"

namespace adaptfv
{

namespace
{

std::string fmt(const char *f, double x)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string list(const std::vector<double> &v, const char *f = "%.4g")
{
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); i++)
  {
    s += (i ? ", " : "") + fmt(f, v[i]);
  }
  return s + "]";
}

// Convex polygon: points on a randomly stretched and rotated ellipse.
std::vector<Vec2> random_convex_polygon(std::mt19937_64 &rng, int n)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> angles(n);
  for (double &a : angles)
  {
    a = 2.0 * M_PI * u(rng);
  }
  std::sort(angles.begin(), angles.end());
  for (int i = 1; i < n; i++)
  {
    angles[i] = std::max(angles[i], angles[i - 1] + 0.2);
  }
  const double sx = 0.5 + u(rng), sy = 0.5 + u(rng), rot = 2.0 * M_PI * u(rng);
  const Vec2 shift(u(rng), u(rng));
  std::vector<Vec2> pts;
  for (double a : angles)
  {
    const Vec2 p(sx * std::cos(a), sy * std::sin(a));
    pts.push_back(Eigen::Rotation2Dd(rot) * p + shift);
  }
  return pts;
}

Mesh random_cell(std::mt19937_64 &rng, bool simplicial)
{
  const int n = simplicial ? 3 : 3 + static_cast<int>(rng() % 6);
  const auto pts = random_convex_polygon(rng, n);
  std::vector<int> loop(n);
  for (int i = 0; i < n; i++)
  {
    loop[i] = i;
  }
  if (simplicial)
  {
    return build_simplicial(pts, {{0, 1, 2}});
  }
  return build_polytopal(pts, {loop});
}

Eigen::Matrix2d random_spd(std::mt19937_64 &rng)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::Matrix2d b;
  b << u(rng), u(rng), u(rng), u(rng);
  return b * b.transpose() + 0.2 * Eigen::Matrix2d::Identity();
}

Eigen::VectorXd random_vector(std::mt19937_64 &rng, int n)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; i++)
  {
    v[i] = u(rng);
  }
  return v;
}

double quadrature_energy(const Submesh &s, const std::vector<RT0Local> &field, const Eigen::Matrix2d &w)
{
  double sum = 0.0;
  for (int t = 0; t < s.num_triangles(); t++)
  {
    sum += integrate(s.triangle(t), [&](const Vec2 &x) {
      const Vec2 v = field[t](x);
      return v.dot(w * v);
    }, 2);
  }
  return sum;
}

struct Outcome
{
  bool pass;
  std::string detail;
};

Outcome guaranteed_bound()
{
  int checked = 0, failed = 0;
  double worst = 0.0;
  std::string first_failure;
  auto check = [&](const std::string &label, double error, double estimate) {
    checked++;
    const double ratio = error / estimate;
    worst = std::max(worst, ratio);
    if (!(error <= estimate * (1.0 + 1e-8)))
    {
      failed++;
      if (first_failure.empty())
      {
        first_failure = label;
      }
    }
  };
  const std::vector<int> levels{8, 16, 32};
  for (const std::string &name : catalog())
  {
    const Problem p = make_problem(name);
    for (bool triangles : {true, false})
    {
      for (int n : levels)
      {
        const Mesh mesh = triangles ? p.triangle_mesh(n) : p.rectangle_mesh(n);
        const std::string tag = name + (triangles ? "/tri/" : "/rect/") + std::to_string(n);
        if (p.nonlinear)
        {
          AdaptiveConfig cfg;
          cfg.exact_algebraic = true;
          cfg.adaptive_linearization = false;
          const NonlinearRun run = adaptive_inexact_solve(p, mesh, cfg);
          check(tag + "/newton", run.total_error, run.estimate.total());
          AdaptiveConfig inexact;
          const NonlinearRun adaptive = adaptive_inexact_solve(p, mesh, inexact);
          check(tag + "/adaptive", adaptive.total_error, adaptive.estimate.total());
          continue;
        }
        const std::vector<std::pair<SchemeKind, PotentialKind>> paths{
            {SchemeKind::tpfa, PotentialKind::p2},
            {SchemeKind::tpfa, PotentialKind::avg},
            {SchemeKind::hmfe, PotentialKind::p2},
            {SchemeKind::hmfe, PotentialKind::hyb}};
        for (const auto &[scheme, potential] : paths)
        {
          LinearOptions o;
          o.scheme = scheme;
          o.potential = potential;
          const LinearRun run = solve_and_estimate(p, mesh, o);
          check(tag + (scheme == SchemeKind::tpfa ? "/tpfa" : "/hmfe"), run.total_error, run.estimate.total());
        }
        AdaptiveConfig inexact;
        const NonlinearRun run = adaptive_inexact_solve(p, mesh, inexact);
        check(tag + "/inexact", run.total_error, run.estimate.total());
      }
    }
  }
  std::string detail = std::to_string(checked) + " runs, max error/estimate " + fmt("%.4f", worst);
  if (failed)
  {
    detail += ", " + std::to_string(failed) + " violations (first " + first_failure + ")";
  }
  return {failed == 0, detail};
}

Outcome matrix_quadrature_identity()
{
  std::mt19937_64 rng(20240601);
  double worst = 0.0;
  for (int trial = 0; trial < 100; trial++)
  {
    const Mesh cell = random_cell(rng, trial % 4 == 0);
    const Submesh &s = cell.submeshes[0];
    const Eigen::Matrix2d k = random_spd(rng);
    const Eigen::Matrix2d w = k.inverse();
    const Eigen::VectorXd u = random_vector(rng, s.num_exterior());
    const LocalNeumannSolution local = solve_local_neumann(s, u, 0.0, w);
    const double quad = quadrature_energy(s, local.field, w);
    const double matrix = u.dot(cell_matrices(s, w, k).a_mfe * u);
    worst = std::max(worst, std::abs(matrix - quad) / std::abs(quad));
  }
  return {worst <= 1e-10, "100 cells, max relative gap " + fmt("%.3g", worst)};
}

Outcome estimator_identity()
{
  std::mt19937_64 rng(7771);
  double worst = 0.0;
  for (int trial = 0; trial < 20; trial++)
  {
    const Mesh cell = random_cell(rng, trial % 5 == 0);
    const Submesh &s = cell.submeshes[0];
    const Eigen::Matrix2d k = random_spd(rng);
    const Eigen::Matrix2d w = k.inverse();
    const int n = s.num_exterior();
    const Eigen::VectorXd u = random_vector(rng, n);
    const Eigen::VectorXd z = random_vector(rng, s.num_points());
    Eigen::VectorXd z_ext(n);
    for (int i = 0; i < n; i++)
    {
      z_ext[i] = 0.5 * (z[s.exterior[i][0]] + z[s.exterior[i][1]]);
    }
    const double matrix =
        estimate_darcy_matrix(u, z, z_ext, u.sum(), cell.areas[0], cell_matrices(s, w, k));
    const LocalNeumannSolution local = solve_local_neumann(s, u, 0.0, w);
    double quad = 0.0;
    for (int t = 0; t < s.num_triangles(); t++)
    {
      const Triangle tri = s.triangle(t);
      Eigen::Matrix2d m;
      m.col(0) = tri[1] - tri[0];
      m.col(1) = tri[2] - tri[0];
      const auto &ids = s.triangles[t];
      const Vec2 dz(z[ids[1]] - z[ids[0]], z[ids[2]] - z[ids[0]]);
      const Vec2 grad = m.transpose().inverse() * dz;
      quad += integrate(tri, [&](const Vec2 &x) {
        const Vec2 v = local.field[t](x) + k * grad;
        return v.dot(w * v);
      }, 2);
    }
    worst = std::max(worst, std::abs(matrix - quad) / std::abs(quad));
  }
  return {worst <= 1e-10, "20 states, max relative gap " + fmt("%.3g", worst)};
}

Outcome equilibration()
{
  double worst_div = 0.0, worst_jump = 0.0;
  struct Case
  {
    std::string problem;
    bool triangles;
    SchemeKind scheme;
  };
  const std::vector<Case> cases{{"peak", true, SchemeKind::tpfa},
                                {"peak", false, SchemeKind::tpfa},
                                {"lshape_linear", true, SchemeKind::hmfe},
                                {"alpha200", false, SchemeKind::hmfe}};
  for (const Case &c : cases)
  {
    const Problem p = make_problem(c.problem);
    const Mesh mesh = c.triangles ? p.triangle_mesh(16) : p.rectangle_mesh(16);
    LinearOptions o;
    o.scheme = c.scheme;
    o.potential = c.scheme == SchemeKind::tpfa ? PotentialKind::avg : PotentialKind::hyb;
    const LinearRun run = solve_and_estimate(p, mesh, o);
    const Eigen::VectorXd f = cell_integrals(mesh, p);
    double fmax = 0.0;
    for (int K = 0; K < mesh.num_cells(); K++)
    {
      const Submesh &s = mesh.submeshes[K];
      for (int t = 0; t < s.num_triangles(); t++)
      {
        const Triangle tri = s.triangle(t);
        for (const auto &b : quad_rule(5).points)
        {
          fmax = std::max(fmax, std::abs(p.source(map_point(tri, b))));
        }
      }
    }
    // Harmonic data (f = 0) is checked against an absolute 1e-10.
    fmax = std::max(fmax, 1.0);
    for (int K = 0; K < mesh.num_cells(); K++)
    {
      for (const RT0Local &piece : run.lifting.cells[K])
      {
        worst_div = std::max(worst_div, std::abs(piece.divergence() - f[K] / mesh.areas[K]) / fmax);
      }
    }
    // Normal-trace jumps across every interior edge of the submesh.
    const GlobalSubmesh gsm = build_global_submesh(mesh);
    std::vector<std::vector<int>> edge_triangles(gsm.num_edges());
    for (int t = 0; t < gsm.num_triangles(); t++)
    {
      for (int e : gsm.triangle_edges[t])
      {
        edge_triangles[e].push_back(t);
      }
    }
    double umax = 0.0;
    for (int t = 0; t < gsm.num_triangles(); t++)
    {
      const int K = gsm.parent[t];
      const Triangle tri = gsm.triangle(t);
      for (const Vec2 &v : tri)
      {
        umax = std::max(umax, run.lifting.cells[K][t - gsm.first_triangle[K]](v).norm());
      }
    }
    for (int e = 0; e < gsm.num_edges(); e++)
    {
      if (edge_triangles[e].size() != 2)
      {
        continue;
      }
      const Vec2 a = gsm.points[gsm.edges[e][0]], b = gsm.points[gsm.edges[e][1]];
      const Vec2 tangent = b - a;
      const Vec2 normal = Vec2(tangent.y(), -tangent.x()).normalized();
      for (double s : {0.0, 0.5, 1.0})
      {
        const Vec2 x = a + s * tangent;
        double values[2];
        for (int side = 0; side < 2; side++)
        {
          const int t = edge_triangles[e][side];
          const int K = gsm.parent[t];
          values[side] = run.lifting.cells[K][t - gsm.first_triangle[K]](x).dot(normal);
        }
        worst_jump = std::max(worst_jump, std::abs(values[0] - values[1]) / umax);
      }
    }
  }
  const bool pass = worst_div <= 1e-10 && worst_jump <= 1e-12;
  return {pass, "max |div u_h - mean f|/|f|_inf " + fmt("%.3g", worst_div) + ", max relative normal jump " +
                    fmt("%.3g", worst_jump)};
}

Outcome peak_effectivity()
{
  const Problem p = make_problem("peak");
  std::vector<double> sharp, matrix;
  for (int n : {32, 64, 128, 256})
  {
    const Mesh mesh = p.rectangle_mesh(n);
    LinearOptions o;
    o.scheme = SchemeKind::tpfa;
    o.potential = PotentialKind::p2;
    const LinearRun run = solve_and_estimate(p, mesh, o);
    sharp.push_back(effectivity(run.estimate.total(), run.total_error));
    o.potential = PotentialKind::avg;
    const LinearRun point = solve_and_estimate(p, mesh, o);
    matrix.push_back(effectivity(point.estimate.total(), point.total_error));
  }
  bool pass = sharp.back() <= sharp[sharp.size() - 2];
  for (double v : sharp)
  {
    pass = pass && v >= 1.0 && v <= 1.5;
  }
  return {pass, "n=32..256 I_eff " + list(sharp) + " (point-value matrix estimate " + list(matrix) + ")"};
}

Outcome lshape_effectivity()
{
  const Problem p = make_problem("lshape_linear");
  std::vector<double> fv, mixed;
  for (int n : {16, 32, 64})
  {
    const Mesh mesh = p.triangle_mesh(n);
    LinearOptions o;
    o.scheme = SchemeKind::tpfa;
    o.potential = PotentialKind::p2;
    const LinearRun run = solve_and_estimate(p, mesh, o);
    fv.push_back(effectivity(run.estimate.total(), run.total_error));
    o.scheme = SchemeKind::hmfe;
    const LinearRun ref = solve_and_estimate(p, mesh, o);
    mixed.push_back(effectivity(ref.estimate.total(), ref.total_error));
  }
  bool pass = true;
  for (double v : fv)
  {
    pass = pass && v >= 1.0 && v <= 1.8;
  }
  return {pass, "two-point n=16,32,64 I_eff " + list(fv) + " (mixed scheme, same reconstruction " + list(mixed) + ")"};
}

std::vector<double> sweep_values()
{
  return {1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
}

constexpr int nonlinear_grid = 100;

Outcome nonlinear_robustness()
{
  std::vector<double> ieff;
  for (double C : sweep_values())
  {
    const Problem p = make_problem("smooth_nonlinear", 1.0, C);
    AdaptiveConfig cfg;
    cfg.exact_algebraic = true;
    cfg.adaptive_linearization = false;
    const NonlinearRun run = adaptive_inexact_solve(p, p.rectangle_mesh(nonlinear_grid), cfg);
    ieff.push_back(effectivity(run.estimate.total(), run.total_error));
  }
  const double lo = *std::min_element(ieff.begin(), ieff.end());
  const double hi = *std::max_element(ieff.begin(), ieff.end());
  const bool pass = hi / lo <= 1.25 && lo >= 1.0 && hi <= 1.6;
  return {pass, "C=1e1..1e6 I_eff " + list(ieff, "%.3g") + ", max/min " + fmt("%.3g", hi / lo)};
}

Outcome adaptive_stopping()
{
  bool pass = true;
  std::vector<double> steps_ratio, estimate_ratio;
  for (double C : sweep_values())
  {
    const Problem p = make_problem("smooth_nonlinear", 1.0, C);
    const Mesh mesh = p.rectangle_mesh(nonlinear_grid);
    AdaptiveConfig adaptive;
    adaptive.exact_algebraic = true;
    adaptive.gamma_lin = 0.1;
    AdaptiveConfig standard = adaptive;
    standard.adaptive_linearization = false;
    const NonlinearRun a = adaptive_inexact_solve(p, mesh, adaptive);
    const NonlinearRun s = adaptive_inexact_solve(p, mesh, standard);
    const double r = static_cast<double>(a.linearization_steps) / s.linearization_steps;
    const double e = a.estimate.total() / s.estimate.total();
    steps_ratio.push_back(r);
    estimate_ratio.push_back(e);
    pass = pass && r <= 0.5 && e <= 1.1;
  }
  return {pass, "Newton steps adaptive/standard " + list(steps_ratio, "%.3g") + ", estimate ratio " +
                    list(estimate_ratio, "%.4g")};
}

Outcome algebraic_saving()
{
  const Problem p = make_problem("lshape_linear");
  long adaptive_work = 0, adaptive_i = 0, standard_work = 0;
  double inflation = 0.0;
  for (int n : {16, 32, 64})
  {
    const Mesh mesh = p.triangle_mesh(n);
    AdaptiveConfig adaptive;
    adaptive.gamma_alg = 0.01;
    AdaptiveConfig standard = adaptive;
    standard.adaptive_algebraic = false;
    standard.standard_alg_tol = 1e-12;
    const NonlinearRun a = adaptive_inexact_solve(p, mesh, adaptive);
    const NonlinearRun s = adaptive_inexact_solve(p, mesh, standard);
    adaptive_work += a.algebraic_steps;
    for (const IterationRecord &r : a.history)
    {
      adaptive_i += r.i;
    }
    standard_work += s.algebraic_steps;
    inflation = std::max(inflation, a.total_error / s.total_error - 1.0);
  }
  const double ratio = static_cast<double>(adaptive_work) / standard_work;
  const bool pass = ratio <= 0.6 && inflation <= 0.05;
  return {pass, "CG steps " + std::to_string(adaptive_work) + " (i+j) vs " + std::to_string(standard_work) +
                    ", ratio " + fmt("%.3f", ratio) + " (stopping index alone " +
                    fmt("%.3f", static_cast<double>(adaptive_i) / standard_work) + "), error inflation " +
                    fmt("%.2e", inflation)};
}

double interpolate_loglog(const std::vector<StudyRow> &rows, int ndof)
{
  for (std::size_t l = 0; l + 1 < rows.size(); l++)
  {
    if (ndof >= rows[l].ndof && ndof <= rows[l + 1].ndof)
    {
      const double t = std::log(static_cast<double>(ndof) / rows[l].ndof) /
                       std::log(static_cast<double>(rows[l + 1].ndof) / rows[l].ndof);
      return std::exp((1.0 - t) * std::log(rows[l].error) + t * std::log(rows[l + 1].error));
    }
  }
  return std::nan("");
}

Outcome amr_beats_uniform()
{
  const Problem p = make_problem("lshape_linear");
  AmrOptions o;
  o.linear.scheme = SchemeKind::hmfe;
  o.linear.potential = PotentialKind::p2;
  o.delta_ref = 0.7;
  o.levels = 20;
  const auto adaptive = amr_loop(p, p.triangle_mesh(16), o);
  StudyOptions so;
  so.linear = o.linear;
  const auto uniform = convergence_study(p, uniform_family(p, true, 16, 4), so);
  bool pass = true;
  std::vector<double> ratios;
  for (std::size_t l = 2; l < adaptive.size(); l++)
  {
    const double u = interpolate_loglog(uniform, adaptive[l].ndof);
    const double r = adaptive[l].error / u;
    ratios.push_back(r);
    pass = pass && std::isfinite(r) && r < 1.0;
  }
  return {pass, "adaptive/uniform error at matched ndof, levels 2.." + std::to_string(adaptive.size() - 1) +
                    ": " + list(ratios, "%.3f") + ", final ndof " + std::to_string(adaptive.back().ndof)};
}

Outcome scheme_oracles()
{
  double hmfe_gap = 0.0, tpfa_gap = 0.0;
  for (const std::string &name : {std::string("peak"), std::string("lshape_linear")})
  {
    const Problem p = make_problem(name);
    const std::vector<Mesh> meshes = name == "peak"
                                         ? std::vector<Mesh>{rectangle_grid(5, 5), triangle_grid(4)}
                                         : std::vector<Mesh>{lshape_triangle_mesh(2), lshape_rectangle_mesh(4)};
    for (const Mesh &mesh : meshes)
    {
      const std::vector<double> k(mesh.num_cells(), p.k);
      const auto mats = all_cell_matrices(mesh, k);
      std::vector<Eigen::MatrixXd> elements;
      for (const auto &m : mats)
      {
        elements.push_back(m.a_mfe);
      }
      const Eigen::VectorXd f = cell_integrals(mesh, p);
      const HmfeSystem sys = assemble_hmfe(mesh, elements, f, p.boundary());
      const HmfeSolution sol = hmfe_recover(mesh, sys, direct_solve(sys.system.matrix, sys.system.rhs));
      const SaddleSolution dense = solve_saddle_dense(mesh, elements, f, p.boundary());
      const double scale = std::max(dense.u.cwiseAbs().maxCoeff(), dense.p.cwiseAbs().maxCoeff());
      hmfe_gap = std::max({hmfe_gap, (sol.u - dense.u).cwiseAbs().maxCoeff() / scale,
                           (sol.p - dense.p).cwiseAbs().maxCoeff() / scale});
    }
  }
  // Two-point systems on at most 10 cells against a dense assembly from geometry.
  for (const Mesh &mesh : {triangle_grid(2), rectangle_grid(3, 3), rectangle_grid(2, 5)})
  {
    const Problem p = make_problem("peak");
    const AdmissibilityData adm = admissibility(mesh);
    const Eigen::VectorXd f = cell_integrals(mesh, p);
    const LinearSystem sys = assemble_tpfa(mesh, make_tpfa(mesh, adm, std::vector<double>(mesh.num_cells(), p.k), p.boundary()), f);
    const Eigen::VectorXd sparse = direct_solve(sys.matrix, sys.rhs);
    const int nc = mesh.num_cells();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nc, nc);
    for (const Face &F : mesh.faces)
    {
      const Vec2 xl = adm.points[F.left];
      if (F.boundary())
      {
        a(F.left, F.left) += p.k * F.length / std::abs((xl - F.midpoint).dot(F.normal));
        continue;
      }
      const double t = p.k * F.length / (adm.points[F.right] - xl).norm();
      a(F.left, F.left) += t;
      a(F.right, F.right) += t;
      a(F.left, F.right) -= t;
      a(F.right, F.left) -= t;
    }
    const Eigen::VectorXd dense = dense_lu_solve(a, f).col(0);
    tpfa_gap = std::max(tpfa_gap, (sparse - dense).cwiseAbs().maxCoeff() / dense.cwiseAbs().maxCoeff());
  }
  return {hmfe_gap <= 1e-10 && tpfa_gap <= 1e-12,
          "hybridized vs saddle " + fmt("%.3g", hmfe_gap) + ", two-point vs dense LU " + fmt("%.3g", tpfa_gap)};
}

Outcome jacobian_check()
{
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  double worst = 0.0;
  const std::vector<std::pair<std::string, bool>> setups{
      {"smooth_nonlinear", true}, {"smooth_nonlinear", false}, {"lshape_nonlinear", true}};
  for (int state = 0; state < 30; state++)
  {
    const auto &[name, triangles] = setups[state % setups.size()];
    const Problem p = make_problem(name, 1.0, state % 2 ? 10.0 : 1000.0);
    const Mesh mesh = triangles ? p.triangle_mesh(4) : p.rectangle_mesh(6);
    const NonlinearTpfa model(mesh, admissibility(mesh), p.law, cell_integrals(mesh, p), p.boundary());
    Eigen::VectorXd x(mesh.num_cells());
    for (int K = 0; K < x.size(); K++)
    {
      x[K] = u(rng);
    }
    const Eigen::MatrixXd jac = Eigen::MatrixXd(model.jacobian(x));
    for (int c = 0; c < x.size(); c++)
    {
      const double h = 1e-6 * std::max(1.0, std::abs(x[c]));
      Eigen::VectorXd xp = x, xm = x;
      xp[c] += h;
      xm[c] -= h;
      const Eigen::VectorXd fd = (model.residual(xp) - model.residual(xm)) / (2.0 * h);
      worst = std::max(worst, (jac.col(c) - fd).norm() / std::max(fd.norm(), 1e-300));
    }
  }
  return {worst <= 1e-5, "30 states, max relative column error " + fmt("%.3g", worst)};
}

struct Spec
{
  const char *name;
  double budget;
  Outcome (*run)();
};

const Spec &spec(int id)
{
  static const Spec specs[num_criteria] = {
      {"guaranteed-bound", 300.0, guaranteed_bound},
      {"matrix-quadrature-identity", 10.0, matrix_quadrature_identity},
      {"estimator-identity", 30.0, estimator_identity},
      {"equilibration", 10.0, equilibration},
      {"peak-effectivity", 60.0, peak_effectivity},
      {"lshape-effectivity", 60.0, lshape_effectivity},
      {"nonlinear-robustness", 180.0, nonlinear_robustness},
      {"adaptive-linearization-saving", 180.0, adaptive_stopping},
      {"adaptive-algebraic-saving", 120.0, algebraic_saving},
      {"amr-beats-uniform", 120.0, amr_beats_uniform},
      {"scheme-oracles", 10.0, scheme_oracles},
      {"jacobian-check", 20.0, jacobian_check},
  };
  if (id < 1 || id > num_criteria)
  {
    throw Error(ErrorCode::InvalidInput, "criterion id must be in 1.." + std::to_string(num_criteria));
  }
  return specs[id - 1];
}

}  // namespace

CriterionResult run_criterion(int id)
{
  const Spec &s = spec(id);
  CriterionResult r;
  r.id = id;
  r.name = s.name;
  r.budget = s.budget;
  const auto t0 = std::chrono::steady_clock::now();
  try
  {
    const Outcome o = s.run();
    r.pass = o.pass;
    r.detail = o.detail;
  }
  catch (const std::exception &e)
  {
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.seconds > r.budget)
  {
    r.pass = false;
    r.detail += " (over time budget)";
  }
  return r;
}

std::string format_result(const CriterionResult &r)
{
  std::ostringstream s;
  s << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.name << " (" << fmt("%.2f", r.seconds) << "s / "
    << fmt("%.0f", r.budget) << "s): " << r.detail;
  return s.str();
}

}  // namespace adaptfv
