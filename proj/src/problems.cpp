#include "adaptfv/problems.hpp"

#include <cmath>
#include <complex>
#include <memory>

#include "adaptfv/errors.hpp"

namespace adaptfv
{

namespace
{

// Value and first two derivatives of a one-dimensional factor.
struct Factor
{
  double v, d1, d2;
};

using FactorFn = Factor (*)(double);

void set_separable(Problem &p, FactorFn fx, double scale)
{
  p.potential = [fx, scale](const Vec2 &x) { return scale * fx(x.x()).v * fx(x.y()).v; };
  p.gradient = [fx, scale](const Vec2 &x) {
    const Factor a = fx(x.x()), b = fx(x.y());
    return Vec2(scale * a.d1 * b.v, scale * a.v * b.d1);
  };
  p.hessian = [fx, scale](const Vec2 &x) {
    const Factor a = fx(x.x()), b = fx(x.y());
    Eigen::Matrix2d h;
    h << a.d2 * b.v, a.d1 * b.d1, a.d1 * b.d1, a.v * b.d2;
    return Eigen::Matrix2d(scale * h);
  };
}

// x(1-x) exp(-100 (x - 0.75)^2)
Factor peak_factor(double x)
{
  const double t = x - 0.75;
  const double b = std::exp(-100.0 * t * t);
  const double b1 = -200.0 * t * b;
  const double b2 = (-200.0 + 40000.0 * t * t) * b;
  const double a = x * (1.0 - x), a1 = 1.0 - 2.0 * x, a2 = -2.0;
  return {a * b, a1 * b + a * b1, a2 * b + 2.0 * a1 * b1 + a * b2};
}

constexpr double alpha_exponent = 200.0;

// (4x(1-x))^alpha, powers taken in log space.
Factor alpha_factor(double x)
{
  const double q = 4.0 * x * (1.0 - x);
  if (!(q > 0.0))
  {
    return {0.0, 0.0, 0.0};
  }
  const double al = alpha_exponent;
  const double lq = std::log(q);
  const double q1 = 4.0 * (1.0 - 2.0 * x);
  const double pa = std::exp(al * lq), pa1 = std::exp((al - 1.0) * lq), pa2 = std::exp((al - 2.0) * lq);
  return {pa, al * pa1 * q1, al * (al - 1.0) * pa2 * q1 * q1 - 8.0 * al * pa1};
}

Factor smooth_factor(double x)
{
  return {4.0 * x * (1.0 - x), 4.0 * (1.0 - 2.0 * x), -8.0};
}

// z^a with the argument in (-pi, pi].
std::complex<double> branch_power(const Vec2 &x, double a)
{
  const double y = x.y() == 0.0 ? 0.0 : x.y();
  const double r = std::hypot(x.x(), y);
  const double theta = std::atan2(y, x.x());
  return std::polar(std::pow(r, a), a * theta);
}

void set_lshape(Problem &p)
{
  // p = Re F with F(z) = -z^{2/3}.
  p.potential = [](const Vec2 &x) {
    if (x.squaredNorm() == 0.0)
    {
      return 0.0;
    }
    return -branch_power(x, 2.0 / 3.0).real();
  };
  p.gradient = [](const Vec2 &x) {
    if (x.squaredNorm() == 0.0)
    {
      return Vec2(0.0, 0.0);
    }
    const std::complex<double> d = -(2.0 / 3.0) * branch_power(x, -1.0 / 3.0);
    return Vec2(d.real(), -d.imag());
  };
  p.hessian = [](const Vec2 &x) {
    Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
    if (x.squaredNorm() == 0.0)
    {
      return h;
    }
    const std::complex<double> d = (2.0 / 9.0) * branch_power(x, -4.0 / 3.0);
    h << d.real(), -d.imag(), -d.imag(), -d.real();
    return h;
  };
  p.domain = Domain::lshape;
  p.homogeneous = false;
  p.singular_point = Vec2(0.0, 0.0);
}

}  // namespace

bool Problem::inside(const Vec2 &x) const
{
  const double eps = 1e-12;
  if (domain == Domain::unit_square)
  {
    return x.x() >= -eps && x.x() <= 1.0 + eps && x.y() >= -eps && x.y() <= 1.0 + eps;
  }
  const bool box = std::abs(x.x()) <= 1.0 + eps && std::abs(x.y()) <= 1.0 + eps;
  return box && !(x.x() < -eps && x.y() < -eps);
}

double Problem::source(const Vec2 &x) const
{
  const Vec2 g = gradient(x);
  const Eigen::Matrix2d h = hessian(x);
  if (!nonlinear)
  {
    return -k * h.trace();
  }
  const double s = g.norm();
  return -(law.diffusion(s) * h.trace() + law.diffusion_slope_over_s(s) * g.dot(h * g));
}

Vec2 Problem::flux(const Vec2 &x) const
{
  const Vec2 g = gradient(x);
  if (!nonlinear)
  {
    return -k * g;
  }
  return -law.diffusion(g.norm()) * g;
}

ScalarFunction Problem::boundary() const
{
  if (homogeneous)
  {
    return {};
  }
  return potential;
}

Mesh Problem::triangle_mesh(int n) const
{
  return domain == Domain::unit_square ? triangle_grid(n) : lshape_triangle_mesh(n);
}

Mesh Problem::rectangle_mesh(int n) const
{
  return domain == Domain::unit_square ? rectangle_grid(n, n) : lshape_rectangle_mesh(n);
}

std::vector<std::string> catalog()
{
  return {"peak", "lshape_linear", "alpha200", "smooth_nonlinear", "lshape_nonlinear"};
}

Problem make_problem(const std::string &name, double c, double C)
{
  Problem p;
  p.name = name;
  if (name == "peak")
  {
    set_separable(p, peak_factor, 25.0);
  }
  else if (name == "alpha200")
  {
    set_separable(p, alpha_factor, 1.0);
  }
  else if (name == "smooth_nonlinear")
  {
    set_separable(p, smooth_factor, 1.0);
    p.nonlinear = true;
    p.law = Nonlinearity(c, C);
  }
  else if (name == "lshape_linear")
  {
    set_lshape(p);
  }
  else if (name == "lshape_nonlinear")
  {
    set_lshape(p);
    p.nonlinear = true;
    p.law = Nonlinearity(c, C);
  }
  else
  {
    throw Error(ErrorCode::UnknownProblem, "no problem named '" + name + "'");
  }
  return p;
}

Vec2 evaluate_flux(const Problem &problem, const Vec2 &x)
{
  if (!problem.inside(x))
  {
    throw Error(ErrorCode::OutsideDomain, "point (" + std::to_string(x.x()) + ", " +
                                              std::to_string(x.y()) + ") is outside the domain");
  }
  return problem.flux(x);
}

}  // namespace adaptfv
