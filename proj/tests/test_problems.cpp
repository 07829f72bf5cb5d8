#include <doctest.h>

#include <cmath>

#include "adaptfv/problems.hpp"
#include "support.hpp"

using namespace adaptfv;
using adaptfv::test::error_code;

namespace
{

// -div(flux) is the source: central differences of the analytic flux.
double fd_source(const Problem &p, const Vec2 &x, double h)
{
  const Vec2 ex(h, 0.0), ey(0.0, h);
  return ((p.flux(x + ex) - p.flux(x - ex)).x() + (p.flux(x + ey) - p.flux(x - ey)).y()) / (2 * h);
}

std::vector<Vec2> samples(const Problem &p)
{
  std::vector<Vec2> out;
  for (double x : {0.13, 0.37, 0.61, 0.88})
  {
    for (double y : {0.21, 0.49, 0.77})
    {
      out.emplace_back(x, y);
      if (p.domain == Domain::lshape)
      {
        out.emplace_back(-x, y);
        out.emplace_back(x, -y);
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("catalog values at sample points")
{
  CHECK(make_problem("peak").potential(Vec2(0.75, 0.75)) == doctest::Approx(0.87890625).epsilon(1e-15));
  CHECK(make_problem("lshape_linear").potential(Vec2(0.0, 1.0)) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(make_problem("smooth_nonlinear").potential(Vec2(0.5, 0.5)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(evaluate_flux(make_problem("smooth_nonlinear"), Vec2(0.5, 0.5)).norm() < 1e-15);
}

TEST_CASE("sources satisfy the PDE")
{
  for (const std::string &name : catalog())
  {
    for (double C : {1.0, 10.0, 1000.0})
    {
      const Problem p = make_problem(name, 1.0, C);
      for (const Vec2 &x : samples(p))
      {
        const double f = p.source(x);
        CHECK(std::abs(f - fd_source(p, x, 1e-5)) <= 1e-5 * std::max(1.0, std::abs(f)));
      }
    }
  }
}

TEST_CASE("fluxes are minus the diffusion times the gradient")
{
  const Problem p = make_problem("peak");
  const double h = 1e-6;
  for (const Vec2 &x : samples(p))
  {
    const Vec2 fd((p.potential(x + Vec2(h, 0)) - p.potential(x - Vec2(h, 0))) / (2 * h),
                  (p.potential(x + Vec2(0, h)) - p.potential(x - Vec2(0, h))) / (2 * h));
    CHECK((evaluate_flux(p, x) + p.k * fd).norm() <= 1e-6 * std::max(1.0, fd.norm()));
  }
  const Problem lin = make_problem("smooth_nonlinear", 2.0, 2.0);
  const Vec2 x(0.3, 0.6);
  CHECK((lin.flux(x) + lin.gradient(x) / 2.0).norm() < 1e-15);
}

TEST_CASE("homogeneous problems vanish on the boundary")
{
  for (const std::string &name : catalog())
  {
    const Problem p = make_problem(name);
    if (!p.homogeneous)
    {
      continue;
    }
    for (double t : {0.0, 0.1, 0.5, 0.77, 1.0})
    {
      for (const Vec2 &x : {Vec2(t, 0), Vec2(t, 1), Vec2(0, t), Vec2(1, t)})
      {
        CHECK(std::abs(p.potential(x)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("catalog errors")
{
  CHECK(error_code([] { make_problem("nope"); }) == ErrorCode::UnknownProblem);
  CHECK(error_code([] { evaluate_flux(make_problem("lshape_linear"), Vec2(-0.5, -0.5)); }) ==
        ErrorCode::OutsideDomain);
  CHECK(error_code([] { evaluate_flux(make_problem("peak"), Vec2(1.5, 0.5)); }) == ErrorCode::OutsideDomain);
}
