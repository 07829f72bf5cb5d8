#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adaptfv/mesh.hpp"
#include "adaptfv/nonlinear.hpp"

namespace adaptfv
{

enum class Domain
{
  unit_square,
  lshape
};

// Manufactured solution with its flux and source. Linear problems use the
// scalar diffusion `k`; nonlinear ones use `law`.
struct Problem
{
  std::string name;
  Domain domain = Domain::unit_square;
  bool nonlinear = false;
  double k = 1.0;
  Nonlinearity law{1.0, 1.0};
  bool homogeneous = true;
  // Point where derivatives blow up; quadrature is refined around it.
  std::optional<Vec2> singular_point;

  std::function<double(const Vec2 &)> potential;
  std::function<Vec2(const Vec2 &)> gradient;
  std::function<Eigen::Matrix2d(const Vec2 &)> hessian;

  bool inside(const Vec2 &x) const;
  double source(const Vec2 &x) const;
  Vec2 flux(const Vec2 &x) const;
  // Boundary trace; empty for homogeneous problems.
  ScalarFunction boundary() const;
  Mesh triangle_mesh(int n) const;
  Mesh rectangle_mesh(int n) const;
};

std::vector<std::string> catalog();

// Names: peak, lshape_linear, alpha200, smooth_nonlinear, lshape_nonlinear.
// c and C only apply to the nonlinear entries.
Problem make_problem(const std::string &name, double c = 1.0, double C = 10.0);

// Throws OutsideDomain.
Vec2 evaluate_flux(const Problem &problem, const Vec2 &x);

}  // namespace adaptfv
