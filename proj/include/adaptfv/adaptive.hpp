#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adaptfv/estimate.hpp"
#include "adaptfv/mesh.hpp"
#include "adaptfv/nonlinear.hpp"
#include "adaptfv/problems.hpp"
#include "adaptfv/reconstruct.hpp"

namespace adaptfv
{

enum class SchemeKind
{
  tpfa,
  hmfe
};

// Potential reconstruction behind the estimator: P2 averaging (simplicial
// two-point path), or point values averaged from cells or from multipliers.
enum class PotentialKind
{
  p2,
  avg,
  hyb
};

struct LinearOptions
{
  SchemeKind scheme = SchemeKind::tpfa;
  PotentialKind potential = PotentialKind::avg;
  bool ignore_oscillation = false;
  std::optional<Collocation> collocation;  // mesh default when empty
};

struct LinearRun
{
  CellPotentialVector p;
  FaceFluxVector u;
  Eigen::VectorXd multipliers;
  RT0Field lifting;
  EstimateBreakdown estimate;
  Eigen::VectorXd error;  // per cell
  double total_error = 0.0;
  int ndof = 0;
};

// Exact solve of a linear problem followed by estimation and exact error.
LinearRun solve_and_estimate(const Problem &problem, const Mesh &mesh, const LinearOptions &options);

struct AdaptiveConfig
{
  double gamma_lin = 0.1;
  double gamma_alg = 0.01;
  int j_initial = 5;
  int j_max = 80;
  int cadence = 5;
  double delta_ref = 0.7;
  double delta_deref = 0.2;
  int max_linearization = 100;
  int max_algebraic = 100000;
  double standard_lin_tol = 1e-8;
  double standard_alg_tol = 1e-12;
  bool adaptive_linearization = true;
  bool adaptive_algebraic = true;
  bool exact_algebraic = false;
  bool jacobi = false;
  Linearization method = Linearization::newton;
  double friedrichs = 1.0;
  bool ignore_oscillation = false;
  std::optional<Collocation> collocation;
};

struct IterationRecord
{
  int k = 0;
  int i = 0;
  int j = 0;
  double sp = 0.0, lin = 0.0, alg = 0.0, rem = 0.0, osc = 0.0, total = 0.0;
  double lin_residual = 0.0;
  int algebraic_work = 0;
};

struct NonlinearRun
{
  CellPotentialVector p;
  FaceFluxVector u;
  RT0Field lifting;
  EstimateBreakdown estimate;
  Eigen::VectorXd error;
  double total_error = 0.0;
  int linearization_steps = 0;
  int algebraic_steps = 0;
  std::vector<IterationRecord> history;
};

// Two-point scheme with iterative linearization and a step-wise Krylov solver
// stopped by balancing the estimated error components. Linear problems run
// with c = C = 1/k.
NonlinearRun adaptive_inexact_solve(const Problem &problem, const Mesh &mesh, const AdaptiveConfig &config);

std::vector<int> mark_cells(const Eigen::VectorXd &eta, double delta_ref);
std::vector<int> derefine_set(const Eigen::VectorXd &eta, double delta_deref);

struct StudyRow
{
  int level = 0;
  int ndof = 0;
  int ncells = 0;
  double error = 0.0;
  double estimate = 0.0;
  double eta_sp = 0.0, eta_lin = 0.0, eta_alg = 0.0, eta_rem = 0.0;
  double i_eff = 0.0;
  int marked = 0;
  int derefine_candidates = 0;
  int work = 0;  // algebraic solver steps
};

StudyRow make_row(int level, const Mesh &mesh, int ndof, const EstimateBreakdown &est, double error);

struct StudyOptions
{
  LinearOptions linear;
  bool inexact = false;  // route through adaptive_inexact_solve
  AdaptiveConfig adaptive;
};

std::vector<StudyRow> convergence_study(const Problem &problem, const std::vector<Mesh> &meshes,
                                        const StudyOptions &options);

// Uniform levels of a generator family: n, 2n, 4n, ...
std::vector<Mesh> uniform_family(const Problem &problem, bool triangles, int n0, int levels);

struct AmrOptions
{
  LinearOptions linear;
  double delta_ref = 0.7;
  double delta_deref = 0.2;
  bool derefine = false;
  int levels = 6;
  double target_estimate = 0.0;
  // Called after each solve, before marking.
  std::function<void(int, const Mesh &, const LinearRun &)> on_level;
};

std::vector<StudyRow> amr_loop(const Problem &problem, const Mesh &initial, const AmrOptions &options,
                               Mesh *final_mesh = nullptr);

}  // namespace adaptfv
