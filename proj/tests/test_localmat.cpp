#include <doctest.h>

#include <cmath>
#include <random>

#include "adaptfv/localmat.hpp"
#include "adaptfv/reconstruct.hpp"
#include "support.hpp"

using namespace adaptfv;
using adaptfv::test::error_code;

namespace
{

const Triangle reference{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};

double factorial(int n)
{
  return n <= 1 ? 1.0 : n * factorial(n - 1);
}

// Normal flux by two-point Gauss quadrature on the edge.
double gauss_edge_flux(const RT0Local &v, const Vec2 &p, const Vec2 &q)
{
  const Vec2 t = q - p;
  const Vec2 n(t.y(), -t.x());
  const double g = 0.5 / std::sqrt(3.0);
  return 0.5 * (v(p + (0.5 - g) * t).dot(n) + v(p + (0.5 + g) * t).dot(n));
}

Mesh square_cell()
{
  return build_polytopal({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}});
}

}  // namespace

TEST_CASE("quadrature integrates monomials exactly")
{
  CHECK(integrate(reference, [](const Vec2 &) { return 1.0; }, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(integrate(reference, [](const Vec2 &x) { return x.x() * x.x(); }, 2) ==
        doctest::Approx(1.0 / 12.0).epsilon(1e-15));
  for (int a = 0; a <= 5; a++)
  {
    for (int b = 0; a + b <= 5; b++)
    {
      const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
      const double q = integrate(reference, [&](const Vec2 &x) { return std::pow(x.x(), a) * std::pow(x.y(), b); },
                                 a + b);
      CHECK(std::abs(q - exact) <= 1e-14);
    }
  }
  CHECK(error_code([] { quad_rule(6); }) == ErrorCode::UnsupportedDegree);
}

TEST_CASE("RT0 basis on the reference triangle")
{
  const RT0Local v = rt0_basis(reference, 0);
  CHECK(v.a.norm() < 1e-15);
  CHECK(v.c == doctest::Approx(1.0));
  CHECK(gauss_edge_flux(v, reference[1], reference[2]) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(gauss_edge_flux(v, reference[0], reference[1])) < 1e-15);

  const Triangle twice{Vec2(0, 0), Vec2(2, 0), Vec2(0, 2)};
  const RT0Local w = rt0_basis(twice, 0);
  CHECK(w.c == doctest::Approx(0.25));
  CHECK(gauss_edge_flux(w, twice[1], twice[2]) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("RT0 delta-flux property on random triangles")
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; trial++)
  {
    Triangle t{Vec2(u(rng), u(rng)), Vec2(u(rng), u(rng)), Vec2(u(rng), u(rng))};
    if (signed_area(t) < 0.0)
    {
      std::swap(t[1], t[2]);
    }
    if (signed_area(t) < 1e-3)
    {
      continue;
    }
    for (int f = 0; f < 3; f++)
    {
      const RT0Local v = rt0_basis(t, f);
      for (int g = 0; g < 3; g++)
      {
        const double flux = gauss_edge_flux(v, t[(g + 1) % 3], t[(g + 2) % 3]);
        CHECK(std::abs(flux - (f == g ? 1.0 : 0.0)) < 1e-13);
      }
    }
  }
}

TEST_CASE("triangle blocks reduce to the RT0 mass matrix")
{
  const Mesh m = build_simplicial({reference[0], reference[1], reference[2]}, {{0, 1, 2}});
  const Submesh &s = m.submeshes[0];
  const LocalBlocks b = assemble_blocks(s, Eigen::Matrix2d::Identity());
  CHECK(b.a_int_int.size() == 0);
  CHECK(b.a_ext_ext.rows() == 3);
  // Oracle: x - P_i over 2|K| is the basis of the face opposite P_i.
  for (int i = 0; i < 3; i++)
  {
    for (int j = 0; j < 3; j++)
    {
      const int fi = (i + 2) % 3, fj = (j + 2) % 3;  // exterior subface i is opposite vertex i+2
      const double q = integrate(reference, [&](const Vec2 &x) { return (x - reference[fi]).dot(x - reference[fj]); }, 2);
      CHECK(std::abs(b.a_ext_ext(i, j) - q) < 1e-13);
    }
  }
  CHECK((schur_a_mfe(b) - b.a_ext_ext).norm() < 1e-15);
}

TEST_CASE("rectangle fan block sizes and weight scaling")
{
  const Mesh m = square_cell();
  const Submesh &s = m.submeshes[0];
  const LocalBlocks b = assemble_blocks(s, Eigen::Matrix2d::Identity());
  CHECK(b.a_int_int.rows() == 4);
  CHECK(b.a_int_int.cols() == 4);
  CHECK(b.b0_int.rows() == 3);
  CHECK(b.b0_ext.rows() == 3);
  const Eigen::MatrixXd a1 = schur_a_mfe(b);
  const Eigen::MatrixXd a4 = schur_a_mfe(assemble_blocks(s, 4.0 * Eigen::Matrix2d::Identity()));
  CHECK((a4 - 4.0 * a1).norm() <= 1e-14 * a1.norm());
}

TEST_CASE("energy identity on a square cell")
{
  const Mesh m = square_cell();
  const Submesh &s = m.submeshes[0];
  const Eigen::Matrix2d w = Eigen::Matrix2d::Identity();
  const Eigen::MatrixXd a = cell_matrices(s, w, w).a_mfe;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; trial++)
  {
    Eigen::VectorXd flux(4);
    for (int i = 0; i < 4; i++)
    {
      flux[i] = u(rng);
    }
    const LocalNeumannSolution local = solve_local_neumann(s, flux, 0.0, w);
    double energy = 0.0;
    for (int t = 0; t < s.num_triangles(); t++)
    {
      energy += integrate(s.triangle(t), [&](const Vec2 &x) { return local.field[t](x).squaredNorm(); }, 2);
    }
    CHECK(std::abs(flux.dot(a * flux) - energy) <= 1e-10 * energy);
  }
}

TEST_CASE("P1 stiffness and mass on the reference triangle")
{
  const Mesh m = build_simplicial({reference[0], reference[1], reference[2]}, {{0, 1, 2}});
  const Submesh &s = m.submeshes[0];
  Eigen::Matrix3d stiff;
  stiff << 2, -1, -1, -1, 1, 0, -1, 0, 1;
  CHECK((fe_stiffness(s, Eigen::Matrix2d::Identity()) - 0.5 * stiff).norm() < 1e-15);
  Eigen::Matrix3d mass;
  mass << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  CHECK((fe_mass(s) - mass * 0.5 / 12.0).norm() < 1e-15);
}

TEST_CASE("local matrices on random cells are symmetric with a positive mass matrix")
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; trial++)
  {
    const int n = 3 + trial % 6;
    std::vector<Vec2> pts;
    std::vector<int> loop;
    for (int i = 0; i < n; i++)
    {
      const double a = 2 * M_PI * (i + 0.3 * u(rng)) / n;
      const double r = 0.8 + 0.2 * u(rng);
      pts.emplace_back(r * std::cos(a), r * std::sin(a));
      loop.push_back(i);
    }
    const Mesh m = build_polytopal(pts, {loop});
    const Eigen::Matrix2d k = Eigen::Vector2d(1.0 + u(rng), 0.5 + u(rng)).asDiagonal();
    const CellLocalMatrices c = cell_matrices(m.submeshes[0], k.inverse(), k);
    CHECK((c.a_mfe - c.a_mfe.transpose()).norm() <= 1e-13 * c.a_mfe.norm());
    CHECK((c.s_fe - c.s_fe.transpose()).norm() <= 1e-13 * c.s_fe.norm());
    CHECK((c.m_fe - c.m_fe.transpose()).norm() <= 1e-15);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(c.m_fe).eigenvalues().minCoeff() > 0.0);
    CHECK(std::abs(Eigen::VectorXd::Ones(n + 1).dot(c.s_fe * Eigen::VectorXd::Ones(n + 1))) < 1e-13);
  }
}

TEST_CASE("non-SPD weights are rejected")
{
  Eigen::Matrix2d w;
  w << 1, 0, 0, -1;
  CHECK(error_code([&] { check_spd(w); }) == ErrorCode::SingularWeight);
}
