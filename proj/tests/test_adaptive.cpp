#include <doctest.h>

#include <algorithm>

#include "adaptfv/adaptive.hpp"
#include "support.hpp"

using namespace adaptfv;

TEST_CASE("marking")
{
  CHECK(mark_cells(Eigen::Vector3d(1.0, 1.0, 1.0), 0.7).size() == 3);
  CHECK(mark_cells(Eigen::Vector4d(0.1, 5.0, 0.2, 0.1), 0.7) == std::vector<int>{1});
  CHECK(mark_cells(Eigen::Vector3d(1.0, 0.8, 0.5), 0.7) == std::vector<int>{0, 1});
  const Eigen::VectorXd eta = Eigen::VectorXd::LinSpaced(20, 0.01, 3.0);
  CHECK(mark_cells(eta, 0.5) == mark_cells(7.3 * eta, 0.5));
  CHECK(derefine_set(Eigen::Vector3d(1.0, 0.1, 0.5), 0.2) == std::vector<int>{1});
}

TEST_CASE("inexact solve of a linear problem")
{
  const Problem p = make_problem("peak");
  const Mesh mesh = p.triangle_mesh(8);
  AdaptiveConfig exact;
  exact.exact_algebraic = true;
  const NonlinearRun direct = adaptive_inexact_solve(p, mesh, exact);
  CHECK(direct.linearization_steps == 1);
  CHECK(direct.estimate.total_lin < 1e-12 * direct.estimate.total_sp);
  CHECK(direct.estimate.total_alg < 1e-12 * direct.estimate.total_sp);
  LinearOptions o;
  o.scheme = SchemeKind::tpfa;
  const LinearRun reference = solve_and_estimate(p, mesh, o);
  CHECK((direct.p - reference.p).norm() <= 1e-10 * reference.p.norm());

  AdaptiveConfig cfg;
  const NonlinearRun run = adaptive_inexact_solve(p, mesh, cfg);
  CHECK(run.linearization_steps == 1);
  const IterationRecord &last = run.history.back();
  CHECK(last.alg <= cfg.gamma_alg * last.sp);
  CHECK((last.rem <= 0.1 * last.alg || last.j == cfg.j_max));
  CHECK(run.total_error <= run.estimate.total());
  AdaptiveConfig standard = cfg;
  standard.adaptive_algebraic = false;
  CHECK(run.algebraic_steps <= adaptive_inexact_solve(p, mesh, standard).algebraic_steps);
}

TEST_CASE("adaptive linearization on the smooth nonlinear problem")
{
  const Problem p = make_problem("smooth_nonlinear", 1.0, 10.0);
  const Mesh mesh = p.rectangle_mesh(100);
  AdaptiveConfig adaptive;
  adaptive.exact_algebraic = true;
  AdaptiveConfig standard = adaptive;
  standard.adaptive_linearization = false;
  const NonlinearRun a = adaptive_inexact_solve(p, mesh, adaptive);
  const NonlinearRun s = adaptive_inexact_solve(p, mesh, standard);
  CHECK(2 * a.linearization_steps <= s.linearization_steps);
  CHECK(a.estimate.total() <= 1.1 * s.estimate.total());
  CHECK(a.history.back().lin <= adaptive.gamma_lin * a.history.back().sp);
  CHECK(a.total_error <= a.estimate.total());
}

TEST_CASE("fixed-point linearization with CG and iterative stopping")
{
  const Problem p = make_problem("lshape_nonlinear", 1.0, 10.0);
  AdaptiveConfig cfg;
  cfg.method = Linearization::fixed_point;
  const NonlinearRun run = adaptive_inexact_solve(p, p.triangle_mesh(4), cfg);
  CHECK(run.linearization_steps >= 1);
  CHECK(run.total_error <= run.estimate.total());
  int work = 0;
  for (const IterationRecord &r : run.history)
  {
    work = std::max(work, r.algebraic_work);
  }
  CHECK(work > 0);
}

TEST_CASE("convergence study rows")
{
  const Problem p = make_problem("peak");
  StudyOptions so;
  CHECK(convergence_study(p, {p.triangle_mesh(4)}, so).size() == 1);
  const std::vector<StudyRow> rows = convergence_study(p, uniform_family(p, false, 4, 3), so);
  REQUIRE(rows.size() == 3);
  for (std::size_t l = 0; l < rows.size(); l++)
  {
    CHECK(rows[l].i_eff >= 1.0 - 1e-8);
    if (l > 0)
    {
      CHECK(rows[l].error < rows[l - 1].error);
      CHECK(rows[l].ncells == 4 * rows[l - 1].ncells);
    }
  }
}

TEST_CASE("adaptive refinement concentrates at the reentrant corner")
{
  const Problem p = make_problem("lshape_linear");
  AmrOptions o;
  o.linear.scheme = SchemeKind::hmfe;
  o.levels = 4;
  o.derefine = true;
  int callbacks = 0;
  o.on_level = [&](int, const Mesh &, const LinearRun &) { callbacks++; };
  Mesh final_mesh;
  const std::vector<StudyRow> rows = amr_loop(p, p.triangle_mesh(4), o, &final_mesh);
  REQUIRE(rows.size() == 4);
  CHECK(callbacks == 4);
  for (std::size_t l = 0; l + 1 < rows.size(); l++)
  {
    CHECK(rows[l].marked > 0);
    CHECK(rows[l].marked < rows[l].ncells);
    CHECK(rows[l].i_eff >= 1.0);
  }
  CHECK(final_mesh.num_cells() == rows.back().ncells);
  double smallest = 1e300;
  int smallest_cell = 0;
  for (int K = 0; K < final_mesh.num_cells(); K++)
  {
    if (final_mesh.areas[K] < smallest)
    {
      smallest = final_mesh.areas[K];
      smallest_cell = K;
    }
  }
  CHECK(final_mesh.centroids[smallest_cell].norm() < 0.25);

  o.target_estimate = 1e9;
  CHECK(amr_loop(p, p.triangle_mesh(4), o).size() == 1);
}
