#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace adaptfv
{

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

struct LinearSystem
{
  SparseMatrix matrix;
  Vector rhs;
};

enum class KrylovMethod
{
  cg,
  bicgstab
};

// State of a Krylov iteration, advanced one step at a time by the caller.
struct IterativeState
{
  KrylovMethod method = KrylovMethod::cg;
  Vector x;
  Vector r;
  int iteration = 0;
  bool jacobi = false;

  // CG
  Vector z, p;
  double rz = 0.0;
  // BiCGStab
  Vector r_hat, v, s, t;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
};

inline constexpr int residual_refresh_interval = 50;

IterativeState start_iteration(const SparseMatrix &a, const Vector &b, const Vector &x0,
                               KrylovMethod method, bool jacobi = false);

void cg_step(const SparseMatrix &a, const Vector &b, IterativeState &state);
void bicgstab_step(const SparseMatrix &a, const Vector &b, IterativeState &state);
void krylov_step(const SparseMatrix &a, const Vector &b, IterativeState &state);

struct SolveResult
{
  Vector x;
  int iterations = 0;
  double relative_residual = 0.0;
};

// Iterates until |b - A x| <= rel_tol |b|. Throws MaxIterations.
SolveResult run_to_tolerance(const SparseMatrix &a, const Vector &b, const Vector &x0,
                             double rel_tol, int max_iter, KrylovMethod method,
                             bool jacobi = false);

// Sparse LU. Throws Singular.
Vector direct_solve(const SparseMatrix &a, const Vector &b);

// Dense LU with partial pivoting. Throws Singular.
Eigen::MatrixXd dense_lu_solve(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b);

bool is_symmetric(const SparseMatrix &a, double rel_tol = 1e-12);

}  // namespace adaptfv
