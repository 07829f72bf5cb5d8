#include "adaptfv/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "adaptfv/errors.hpp"
#include "adaptfv/localmat.hpp"
#include "adaptfv/scheme.hpp"
#include "adaptfv/sparse_linalg.hpp"

namespace adaptfv
{

namespace
{

std::vector<LocalNeumannSolution> local_solutions(const Mesh &mesh, const FaceFluxVector &u,
                                                  const CellPotentialVector &p, const std::vector<double> &k)
{
  std::vector<LocalNeumannSolution> out(mesh.num_cells());
  for (int K = 0; K < mesh.num_cells(); K++)
  {
    const double kk = k.empty() ? 1.0 : k[K];
    out[K] = solve_local_neumann(mesh.submeshes[K], cell_exterior(mesh, K, u), p[K],
                                 Eigen::Matrix2d::Identity() / kk);
  }
  return out;
}

AdmissibilityData collocate(const Mesh &mesh, const std::optional<Collocation> &choice)
{
  return choice ? admissibility(mesh, *choice) : admissibility(mesh);
}

}  // namespace

LinearRun solve_and_estimate(const Problem &problem, const Mesh &mesh, const LinearOptions &options)
{
  if (problem.nonlinear)
  {
    throw Error(ErrorCode::InvalidInput, "problem '" + problem.name + "' is nonlinear");
  }
  const int nc = mesh.num_cells();
  const std::vector<double> k(nc, problem.k);
  const Eigen::VectorXd f = cell_integrals(mesh, problem);
  const ScalarFunction g = problem.boundary();
  const Eigen::VectorXd osc = options.ignore_oscillation ? Eigen::VectorXd::Zero(nc) : oscillation(mesh, problem);

  LinearRun run;
  std::vector<CellLocalMatrices> matrices;
  if (options.scheme == SchemeKind::tpfa)
  {
    const TpfaOperator op = make_tpfa(mesh, collocate(mesh, options.collocation), k, g);
    const LinearSystem sys = assemble_tpfa(mesh, op, f);
    run.p = direct_solve(sys.matrix, sys.rhs);
    run.u = tpfa_fluxes(mesh, op, run.p);
    run.ndof = nc;
  }
  else
  {
    matrices = all_cell_matrices(mesh, k);
    std::vector<Eigen::MatrixXd> elements(nc);
    for (int K = 0; K < nc; K++)
    {
      elements[K] = matrices[K].a_mfe;
    }
    const HmfeSystem sys = assemble_hmfe(mesh, elements, f, g);
    const HmfeSolution sol = hmfe_recover(mesh, sys, direct_solve(sys.system.matrix, sys.system.rhs));
    run.p = sol.p;
    run.u = sol.u;
    run.multipliers = sol.multipliers;
    run.ndof = static_cast<int>(sys.system.rhs.size());
  }

  const GlobalSubmesh gsm = build_global_submesh(mesh);
  run.lifting = lift_flux(mesh, run.u, k);
  if (options.potential == PotentialKind::p2)
  {
    std::vector<double> means;
    bool fans = false;
    for (const Submesh &s : mesh.submeshes)
    {
      fans = fans || s.fan;
    }
    P2Potential s;
    if (fans)
    {
      s = reconstruct_p2_polytopal(mesh, gsm, local_solutions(mesh, run.u, run.p, k), k, g);
    }
    else
    {
      s = average_p2(gsm, postprocess_potential(gsm, run.lifting, repeat_cell_values(gsm, run.p), k), g);
    }
    run.estimate = estimate_poisson(mesh, gsm, run.lifting, s, f, osc, k);
  }
  else
  {
    if (matrices.empty())
    {
      matrices = all_cell_matrices(mesh, k);
    }
    const PointValues z = options.potential == PotentialKind::avg
                              ? point_values_avg(mesh, run.p, g)
                              : point_values_hyb(mesh, run.multipliers, run.p, g);
    run.estimate = estimate_darcy(mesh, matrices, run.u, z, flux_divergence(mesh, run.u), osc, k);
  }
  run.error = exact_energy_error(mesh, gsm, problem, run.lifting, ErrorWeight::inverse_diffusion);
  run.total_error = root_sum_squares(run.error);
  return run;
}

namespace
{

// Krylov iterates of one linearization step, kept while they may still be
// needed as the look-ahead iterate P^{k,i+j}.
class IterateWindow
{
public:
  IterateWindow(const SparseMatrix &a, const Vector &b, const Vector &x0, KrylovMethod method, bool jacobi)
    : a_(a), b_(b), state_(start_iteration(a, b, x0, method, jacobi)), bnorm_(b.norm())
  {
    iterates_[0] = state_.x;
  }

  int count() const { return count_; }

  void advance()
  {
    // A converged Krylov state cannot take further steps; its iterate repeats.
    if (state_.r.norm() > 1e-15 * bnorm_)
    {
      krylov_step(a_, b_, state_);
    }
    iterates_[++count_] = state_.x;
  }

  const Vector &at(int n) const { return iterates_.at(n); }

  void forget_before(int n) { iterates_.erase(iterates_.begin(), iterates_.lower_bound(n)); }

private:
  const SparseMatrix &a_;
  const Vector &b_;
  IterativeState state_;
  double bnorm_;
  int count_ = 0;
  std::map<int, Vector> iterates_;
};

struct StepSnapshot
{
  Vector p;      // P^{k,i}
  Vector ahead;  // P^{k,i+j}
  int i = 0;
  int j = 0;
  EstimateBreakdown estimate;
};

struct InexactContext
{
  const Mesh &mesh;
  const NonlinearTpfa &model;
  const std::vector<CellLocalMatrices> &unit;
  const Eigen::VectorXd &osc;
  const EstimatorConfig &config;
  ScalarFunction g;

  EstimateBreakdown estimate(const NonlinearTpfa::Linearized &lin, const Vector &p, const Vector &ahead) const
  {
    ComponentFluxes flux;
    flux.u = model.fluxes(p);
    const FaceFluxVector at_p = NonlinearTpfa::evaluate(lin, p);
    const FaceFluxVector at_ahead = NonlinearTpfa::evaluate(lin, ahead);
    flux.lin = at_p - flux.u;
    flux.alg = at_ahead - at_p;
    flux.residual = model.source() - flux_divergence(mesh, at_ahead);
    return estimate_nonlinear(mesh, unit, flux, point_values_avg(mesh, p, g), osc, config);
  }
};

bool remainder_small(const EstimateBreakdown &e, bool linear)
{
  const double ref = linear ? e.total_alg : std::min(e.total_alg, e.total_lin);
  return e.total_rem <= 0.1 * ref;
}

StepSnapshot algebraic_solve(const InexactContext &ctx, const NonlinearTpfa::Linearized &lin, const Vector &x0,
                             KrylovMethod method, const AdaptiveConfig &config, bool linear)
{
  const SparseMatrix &a = lin.system.matrix;
  const Vector &b = lin.system.rhs;
  StepSnapshot snap;
  if (config.exact_algebraic)
  {
    snap.p = direct_solve(a, b);
    snap.ahead = snap.p;
    snap.i = 1;
    snap.estimate = ctx.estimate(lin, snap.p, snap.ahead);
    return snap;
  }
  if (!config.adaptive_algebraic)
  {
    const SolveResult r =
        run_to_tolerance(a, b, x0, config.standard_alg_tol, config.max_algebraic, method, config.jacobi);
    snap.p = r.x;
    snap.ahead = r.x;
    snap.i = r.iterations;
    snap.estimate = ctx.estimate(lin, snap.p, snap.ahead);
    return snap;
  }
  const int cadence = std::max(1, config.cadence);
  IterateWindow window(a, b, x0, method, config.jacobi);
  int i = cadence;
  int j = std::max(1, config.j_initial);
  while (true)
  {
    while (window.count() < i + j)
    {
      if (window.count() >= config.max_algebraic)
      {
        throw Error(ErrorCode::MaxIterations,
                    "algebraic stopping criterion not met within " + std::to_string(config.max_algebraic) +
                        " iterations");
      }
      window.advance();
    }
    snap.estimate = ctx.estimate(lin, window.at(i), window.at(i + j));
    if (!remainder_small(snap.estimate, linear) && j < config.j_max)
    {
      j = std::min(2 * j, config.j_max);
      continue;
    }
    if (snap.estimate.total_alg <= config.gamma_alg * snap.estimate.total_sp)
    {
      snap.p = window.at(i);
      snap.ahead = window.at(i + j);
      snap.i = i;
      snap.j = j;
      return snap;
    }
    i += cadence;
    window.forget_before(i);
  }
}

}  // namespace

NonlinearRun adaptive_inexact_solve(const Problem &problem, const Mesh &mesh, const AdaptiveConfig &config)
{
  const bool linear = !problem.nonlinear;
  const Nonlinearity law = linear ? Nonlinearity(1.0 / problem.k, 1.0 / problem.k) : problem.law;
  const int nc = mesh.num_cells();
  const Eigen::VectorXd f = cell_integrals(mesh, problem);
  const Eigen::VectorXd osc = config.ignore_oscillation ? Eigen::VectorXd::Zero(nc) : oscillation(mesh, problem);
  const ScalarFunction g = problem.boundary();
  const NonlinearTpfa model(mesh, collocate(mesh, config.collocation), law, f, g);
  const std::vector<CellLocalMatrices> unit = all_cell_matrices(mesh, {});
  EstimatorConfig ec;
  ec.lower = law.lower();
  ec.upper = law.upper();
  ec.friedrichs = config.friedrichs;
  ec.domain_diameter = mesh.domain_diameter();
  ec.ignore_oscillation = config.ignore_oscillation;
  const InexactContext ctx{mesh, model, unit, osc, ec, g};

  NonlinearRun run;
  Vector previous = Vector::Zero(nc);
  Vector start = previous;
  const double residual0 = std::max(model.residual(previous).norm(), 1e-300);
  StepSnapshot snap;
  for (int k = 1; k <= config.max_linearization; k++)
  {
    Linearization method = linear ? Linearization::fixed_point : config.method;
    auto attempt = [&](Linearization m) {
      const NonlinearTpfa::Linearized lin = model.linearization(previous, m);
      const KrylovMethod krylov = m == Linearization::newton ? KrylovMethod::bicgstab : KrylovMethod::cg;
      return algebraic_solve(ctx, lin, start, krylov, config, linear);
    };
    try
    {
      snap = attempt(method);
    }
    catch (const Error &e)
    {
      const bool recoverable = e.code() == ErrorCode::Singular || e.code() == ErrorCode::Breakdown ||
                               e.code() == ErrorCode::MaxIterations;
      if (method != Linearization::newton || !recoverable)
      {
        throw;
      }
      method = Linearization::fixed_point;
      snap = attempt(method);
    }
    run.linearization_steps = k;
    run.algebraic_steps += snap.i + snap.j;

    IterationRecord rec;
    rec.k = k;
    rec.i = snap.i;
    rec.j = snap.j;
    rec.sp = snap.estimate.total_sp;
    rec.lin = snap.estimate.total_lin;
    rec.alg = snap.estimate.total_alg;
    rec.rem = snap.estimate.total_rem;
    rec.osc = snap.estimate.total_osc;
    rec.total = snap.estimate.total();
    rec.lin_residual = model.residual(snap.p).norm() / residual0;
    rec.algebraic_work = snap.i + snap.j;
    run.history.push_back(rec);

    previous = snap.p;
    start = snap.ahead;
    const bool done = config.adaptive_linearization
                          ? snap.estimate.total_lin <= config.gamma_lin * snap.estimate.total_sp
                          : rec.lin_residual <= config.standard_lin_tol;
    if (done)
    {
      break;
    }
  }

  run.p = snap.p;
  run.u = model.fluxes(snap.p);
  run.estimate = snap.estimate;
  run.lifting = lift_flux(mesh, run.u, {});
  const GlobalSubmesh gsm = build_global_submesh(mesh);
  run.error = exact_energy_error(mesh, gsm, problem, run.lifting,
                                 linear ? ErrorWeight::inverse_diffusion : ErrorWeight::lower_bound);
  run.total_error = root_sum_squares(run.error);
  return run;
}

std::vector<int> mark_cells(const Eigen::VectorXd &eta, double delta_ref)
{
  std::vector<int> marked;
  if (eta.size() == 0)
  {
    return marked;
  }
  const double threshold = delta_ref * eta.maxCoeff();
  for (int K = 0; K < eta.size(); K++)
  {
    if (eta[K] >= threshold)
    {
      marked.push_back(K);
    }
  }
  return marked;
}

std::vector<int> derefine_set(const Eigen::VectorXd &eta, double delta_deref)
{
  std::vector<int> out;
  if (eta.size() == 0)
  {
    return out;
  }
  const double threshold = delta_deref * eta.maxCoeff();
  for (int K = 0; K < eta.size(); K++)
  {
    if (eta[K] < threshold)
    {
      out.push_back(K);
    }
  }
  return out;
}

StudyRow make_row(int level, const Mesh &mesh, int ndof, const EstimateBreakdown &est, double error)
{
  StudyRow row;
  row.level = level;
  row.ndof = ndof;
  row.ncells = mesh.num_cells();
  row.error = error;
  row.estimate = est.total();
  row.eta_sp = est.total_sp;
  row.eta_lin = est.total_lin;
  row.eta_alg = est.total_alg;
  row.eta_rem = est.total_rem;
  row.i_eff = error > 0.0 ? effectivity(row.estimate, error) : 0.0;
  return row;
}

std::vector<StudyRow> convergence_study(const Problem &problem, const std::vector<Mesh> &meshes,
                                        const StudyOptions &options)
{
  std::vector<StudyRow> rows;
  for (std::size_t l = 0; l < meshes.size(); l++)
  {
    const Mesh &mesh = meshes[l];
    if (options.inexact || problem.nonlinear)
    {
      const NonlinearRun run = adaptive_inexact_solve(problem, mesh, options.adaptive);
      StudyRow row = make_row(static_cast<int>(l), mesh, mesh.num_cells(), run.estimate, run.total_error);
      row.work = run.algebraic_steps;
      rows.push_back(row);
    }
    else
    {
      const LinearRun run = solve_and_estimate(problem, mesh, options.linear);
      rows.push_back(make_row(static_cast<int>(l), mesh, run.ndof, run.estimate, run.total_error));
    }
  }
  return rows;
}

std::vector<Mesh> uniform_family(const Problem &problem, bool triangles, int n0, int levels)
{
  std::vector<Mesh> out;
  int n = n0;
  for (int l = 0; l < levels; l++, n *= 2)
  {
    out.push_back(triangles ? problem.triangle_mesh(n) : problem.rectangle_mesh(n));
  }
  return out;
}

std::vector<StudyRow> amr_loop(const Problem &problem, const Mesh &initial, const AmrOptions &options,
                               Mesh *final_mesh)
{
  std::vector<StudyRow> rows;
  Mesh mesh = initial;
  for (int level = 0; level < options.levels; level++)
  {
    const LinearRun run = solve_and_estimate(problem, mesh, options.linear);
    StudyRow row = make_row(level, mesh, run.ndof, run.estimate, run.total_error);
    if (options.on_level)
    {
      options.on_level(level, mesh, run);
    }
    const bool reached = options.target_estimate > 0.0 && row.estimate <= options.target_estimate;
    if (level + 1 == options.levels || reached)
    {
      rows.push_back(row);
      break;
    }
    const std::vector<int> marked = mark_cells(run.estimate.indicator(), options.delta_ref);
    row.marked = static_cast<int>(marked.size());
    if (options.derefine)
    {
      // Candidates are reported only; steady runs never coarsen.
      row.derefine_candidates = static_cast<int>(derefine_set(run.estimate.indicator(), options.delta_deref).size());
    }
    rows.push_back(row);
    mesh = refine(mesh, marked);
  }
  if (final_mesh)
  {
    *final_mesh = mesh;
  }
  return rows;
}

}  // namespace adaptfv
