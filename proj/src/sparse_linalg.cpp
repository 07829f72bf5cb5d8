#include "adaptfv/sparse_linalg.hpp"

#include <cmath>
#include <string>

#include <Eigen/SparseLU>

#include "adaptfv/errors.hpp"

namespace adaptfv
{

namespace
{

void check_square(const SparseMatrix &a, const Vector &b)
{
  if (a.rows() != a.cols() || a.rows() != b.size())
  {
    throw Error(ErrorCode::InvalidInput, "system dimensions do not match");
  }
}

Vector apply_jacobi(const SparseMatrix &a, const Vector &r, bool jacobi)
{
  if (!jacobi)
  {
    return r;
  }
  return r.cwiseQuotient(a.diagonal());
}

}  // namespace

IterativeState start_iteration(const SparseMatrix &a, const Vector &b, const Vector &x0,
                               KrylovMethod method, bool jacobi)
{
  check_square(a, b);
  IterativeState s;
  s.method = method;
  s.jacobi = jacobi;
  s.x = x0.size() == b.size() ? x0 : Vector::Zero(b.size());
  s.r = b - a * s.x;
  if (method == KrylovMethod::cg)
  {
    s.z = apply_jacobi(a, s.r, jacobi);
    s.p = s.z;
    s.rz = s.r.dot(s.z);
  }
  else
  {
    s.r_hat = s.r;
    s.p = Vector::Zero(b.size());
    s.v = Vector::Zero(b.size());
  }
  return s;
}

void cg_step(const SparseMatrix &a, const Vector &b, IterativeState &s)
{
  if (s.rz == 0.0)
  {
    return;
  }
  const Vector ap = a * s.p;
  const double pap = s.p.dot(ap);
  if (!(pap > 0.0) || !std::isfinite(pap))
  {
    throw Error(ErrorCode::Breakdown, "CG curvature p^t A p = " + std::to_string(pap));
  }
  const double alpha = s.rz / pap;
  s.x += alpha * s.p;
  s.r -= alpha * ap;
  s.iteration++;
  if (s.iteration % residual_refresh_interval == 0)
  {
    s.r = b - a * s.x;
  }
  s.z = apply_jacobi(a, s.r, s.jacobi);
  const double rz = s.r.dot(s.z);
  s.p = s.z + (rz / s.rz) * s.p;
  s.rz = rz;
}

void bicgstab_step(const SparseMatrix &a, const Vector &b, IterativeState &s)
{
  if (s.r.squaredNorm() == 0.0)
  {
    return;
  }
  const double rho = s.r_hat.dot(s.r);
  if (rho == 0.0 || s.omega == 0.0)
  {
    throw Error(ErrorCode::Breakdown, "BiCGStab lost orthogonality");
  }
  const double beta = (rho / s.rho) * (s.alpha / s.omega);
  s.p = s.r + beta * (s.p - s.omega * s.v);
  s.v = a * s.p;
  const double rv = s.r_hat.dot(s.v);
  if (rv == 0.0)
  {
    throw Error(ErrorCode::Breakdown, "BiCGStab r_hat^t A p vanished");
  }
  s.alpha = rho / rv;
  s.s = s.r - s.alpha * s.v;
  s.rho = rho;
  s.iteration++;
  if (s.s.squaredNorm() == 0.0)
  {
    s.x += s.alpha * s.p;
    s.r = s.s;
    return;
  }
  s.t = a * s.s;
  const double tt = s.t.squaredNorm();
  s.omega = tt > 0.0 ? s.t.dot(s.s) / tt : 0.0;
  s.x += s.alpha * s.p + s.omega * s.s;
  s.r = s.s - s.omega * s.t;
  if (s.iteration % residual_refresh_interval == 0)
  {
    s.r = b - a * s.x;
  }
}

void krylov_step(const SparseMatrix &a, const Vector &b, IterativeState &state)
{
  if (state.method == KrylovMethod::cg)
  {
    cg_step(a, b, state);
  }
  else
  {
    bicgstab_step(a, b, state);
  }
}

SolveResult run_to_tolerance(const SparseMatrix &a, const Vector &b, const Vector &x0, double rel_tol,
                             int max_iter, KrylovMethod method, bool jacobi)
{
  check_square(a, b);
  SolveResult out;
  const double nb = b.norm();
  if (nb == 0.0)
  {
    out.x = Vector::Zero(b.size());
    return out;
  }
  IterativeState s = start_iteration(a, b, x0, method, jacobi);
  while (s.r.norm() > rel_tol * nb)
  {
    if (s.iteration >= max_iter)
    {
      throw Error(ErrorCode::MaxIterations,
                  "Krylov solver did not reach " + std::to_string(rel_tol) + " in " +
                      std::to_string(max_iter) + " iterations");
    }
    krylov_step(a, b, s);
    if (s.r.norm() <= rel_tol * nb)
    {
      // Confirm against the true residual before accepting.
      s.r = b - a * s.x;
    }
  }
  out.x = s.x;
  out.iterations = s.iteration;
  out.relative_residual = (b - a * s.x).norm() / nb;
  return out;
}

Vector direct_solve(const SparseMatrix &a, const Vector &b)
{
  check_square(a, b);
  if (a.rows() == 0)
  {
    return Vector();
  }
  const Eigen::SparseMatrix<double> cm = a;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(cm);
  lu.factorize(cm);
  if (lu.info() != Eigen::Success)
  {
    throw Error(ErrorCode::Singular, "sparse LU factorization failed");
  }
  Vector x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite())
  {
    throw Error(ErrorCode::Singular, "sparse LU solve failed");
  }
  return x;
}

Eigen::MatrixXd dense_lu_solve(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b)
{
  if (a.rows() != a.cols() || a.rows() != b.rows())
  {
    throw Error(ErrorCode::InvalidInput, "dense system dimensions do not match");
  }
  if (a.rows() == 0)
  {
    return b;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  // The condition estimate is unreliable once a pivot is exactly zero.
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (!(pivots.minCoeff() > 1e-14 * pivots.maxCoeff()) || !(lu.rcond() > 1e-14))
  {
    throw Error(ErrorCode::Singular, "matrix is numerically singular");
  }
  return lu.solve(b);
}

bool is_symmetric(const SparseMatrix &a, double rel_tol)
{
  if (a.rows() != a.cols())
  {
    return false;
  }
  const SparseMatrix at = a.transpose();
  return (a - at).norm() <= rel_tol * a.norm();
}

}  // namespace adaptfv
