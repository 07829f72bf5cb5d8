#include <doctest.h>

#include <random>

#include "adaptfv/nonlinear.hpp"
#include "adaptfv/scheme.hpp"
#include "support.hpp"

using namespace adaptfv;

namespace
{

Eigen::VectorXd random_state(int n, std::mt19937_64 &rng)
{
  std::uniform_real_distribution<double> d(0.0, 2.0);
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; i++)
  {
    p[i] = d(rng);
  }
  return p;
}

}  // namespace

TEST_CASE("inverse law and its inversion")
{
  const Nonlinearity law(1.0, 100.0);
  CHECK(law.inverse_law(0.0) == doctest::Approx(100.0));
  CHECK(law.inverse_law(1e8) == doctest::Approx(1.0).epsilon(1e-6));
  for (double r : {0.0, 1e-3, 0.5, 3.0, 40.0, 1e4})
  {
    const double s = law.speed(r);
    CHECK(law.flux_magnitude(s) == doctest::Approx(r).epsilon(1e-12));
    CHECK(law.diffusion(s) * s == doctest::Approx(r).epsilon(1e-12));
    const double h = 1e-6 * std::max(1.0, r);
    CHECK(law.speed_derivative(r) == doctest::Approx((law.speed(r + h) - law.speed(std::max(r - h, 0.0))) /
                                                     (r + h - std::max(r - h, 0.0)))
                                         .epsilon(1e-6));
  }
  const Nonlinearity linear(2.0, 2.0);
  CHECK(linear.is_linear());
  CHECK(linear.diffusion(5.0) == doctest::Approx(0.5));
  CHECK(linear.diffusion_slope_over_s(5.0) == doctest::Approx(0.0));
}

TEST_CASE("nonlinear residual")
{
  const Mesh m = triangle_grid(4);
  const AdmissibilityData adm = admissibility(m);
  const int n = m.num_cells();
  SUBCASE("zero state and zero data")
  {
    const NonlinearTpfa model(m, adm, Nonlinearity(1.0, 10.0), Eigen::VectorXd::Zero(n));
    CHECK(model.residual(Eigen::VectorXd::Zero(n)).norm() == 0.0);
  }
  SUBCASE("linear limit is the scaled two-point residual")
  {
    std::mt19937_64 rng(2);
    const Eigen::VectorXd f = random_state(n, rng);
    const Eigen::VectorXd p = random_state(n, rng);
    const NonlinearTpfa model(m, adm, Nonlinearity(4.0, 4.0), f);
    const TpfaOperator op = make_tpfa(m, adm, std::vector<double>(n, 0.25));
    const Eigen::VectorXd expected = flux_divergence(m, tpfa_fluxes(m, op, p)) - f;
    CHECK((model.residual(p) - expected).norm() <= 1e-13 * expected.norm());
  }
}

TEST_CASE("Newton Jacobian matches finite differences")
{
  std::mt19937_64 rng(6);
  for (const Mesh &m : {triangle_grid(4), rectangle_grid(4, 4)})
  {
    const NonlinearTpfa model(m, admissibility(m), Nonlinearity(1.0, 50.0), Eigen::VectorXd::Zero(m.num_cells()));
    const Eigen::VectorXd p = random_state(m.num_cells(), rng);
    const Eigen::MatrixXd jac(model.jacobian(p));
    for (int c = 0; c < p.size(); c += 3)
    {
      const double h = 1e-6;
      Eigen::VectorXd plus = p, minus = p;
      plus[c] += h;
      minus[c] -= h;
      const Eigen::VectorXd fd = (model.residual(plus) - model.residual(minus)) / (2 * h);
      CHECK((jac.col(c) - fd).norm() <= 1e-6 * fd.norm());
    }
  }
}

TEST_CASE("linearizations")
{
  const Mesh m = rectangle_grid(5, 5);
  const AdmissibilityData adm = admissibility(m);
  std::mt19937_64 rng(12);
  const Eigen::VectorXd f = random_state(m.num_cells(), rng) / 25.0;
  SUBCASE("fixed-point matrix is symmetric")
  {
    const NonlinearTpfa model(m, adm, Nonlinearity(1.0, 10.0), f);
    const LinearSystem sys = model.linearize(random_state(m.num_cells(), rng), Linearization::fixed_point);
    CHECK(is_symmetric(sys.matrix, 1e-13));
  }
  SUBCASE("linear limit converges in one step for both methods")
  {
    const NonlinearTpfa model(m, adm, Nonlinearity(3.0, 3.0), f);
    for (Linearization method : {Linearization::fixed_point, Linearization::newton})
    {
      const LinearSystem sys = model.linearize(random_state(m.num_cells(), rng), method);
      const Eigen::VectorXd p = direct_solve(sys.matrix, sys.rhs);
      CHECK(model.residual(p).norm() <= 1e-12 * f.norm());
    }
  }
  SUBCASE("linearized fluxes agree with the nonlinear ones at the linearization point")
  {
    const NonlinearTpfa model(m, adm, Nonlinearity(1.0, 10.0), f);
    const Eigen::VectorXd p0 = random_state(m.num_cells(), rng);
    for (Linearization method : {Linearization::fixed_point, Linearization::newton})
    {
      const FaceFluxVector lin = model.linearized_fluxes(p0, method, p0);
      CHECK((lin - model.fluxes(p0)).norm() <= 1e-12 * model.fluxes(p0).norm());
      const auto cached = model.linearization(p0, method);
      const Eigen::VectorXd p1 = random_state(m.num_cells(), rng);
      CHECK((NonlinearTpfa::evaluate(cached, p1) - model.linearized_fluxes(p0, method, p1)).norm() <=
            1e-12 * lin.norm());
    }
  }
  SUBCASE("Newton converges quadratically on a nonlinear problem")
  {
    const NonlinearTpfa model(m, adm, Nonlinearity(1.0, 10.0), f);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(m.num_cells());
    std::vector<double> res;
    for (int k = 0; k < 6; k++)
    {
      const LinearSystem sys = model.linearize(p, Linearization::newton);
      p = direct_solve(sys.matrix, sys.rhs);
      res.push_back(model.residual(p).norm());
    }
    CHECK(res.back() <= 1e-13 * f.norm());
  }
}
