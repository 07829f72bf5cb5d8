#include <doctest.h>

#include <cmath>
#include <random>

#include "adaptfv/localmat.hpp"
#include "adaptfv/scheme.hpp"
#include "support.hpp"

using namespace adaptfv;
using adaptfv::test::error_code;

namespace
{

std::vector<Eigen::MatrixXd> mfe_matrices(const Mesh &mesh, double k = 1.0)
{
  std::vector<Eigen::MatrixXd> out;
  for (const CellLocalMatrices &m : all_cell_matrices(mesh, std::vector<double>(mesh.num_cells(), k)))
  {
    out.push_back(m.a_mfe);
  }
  return out;
}

HmfeSolution solve_hmfe(const Mesh &mesh, const Eigen::VectorXd &f, const ScalarFunction &g = {})
{
  const HmfeSystem sys = assemble_hmfe(mesh, mfe_matrices(mesh), f, g);
  return hmfe_recover(mesh, sys, direct_solve(sys.system.matrix, sys.system.rhs));
}

const auto affine = [](const Vec2 &x) { return 1.0 + 2.0 * x.x() - 3.0 * x.y(); };
const Vec2 affine_gradient(2.0, -3.0);

}  // namespace

TEST_CASE("two-point system with zero data")
{
  const Mesh m = triangle_grid(4);
  const AdmissibilityData adm = admissibility(m);
  const LinearSystem sys =
      assemble_tpfa(m, make_tpfa(m, adm, std::vector<double>(m.num_cells(), 1.0)), Eigen::VectorXd::Zero(m.num_cells()));
  CHECK(is_symmetric(sys.matrix));
  for (int r = 0; r < sys.matrix.rows(); r++)
  {
    double off = 0.0;
    for (SparseMatrix::InnerIterator it(sys.matrix, r); it; ++it)
    {
      if (it.col() == r)
      {
        CHECK(it.value() > 0.0);
      }
      else
      {
        CHECK(it.value() <= 0.0);
        off += -it.value();
      }
    }
    CHECK(sys.matrix.coeff(r, r) >= off - 1e-14);
  }
  CHECK(direct_solve(sys.matrix, sys.rhs).norm() == 0.0);
}

TEST_CASE("two-cell rhombus against a dense assembly")
{
  const double h = std::sqrt(3.0) / 2.0;
  const Mesh m = build_simplicial({{0, 0}, {1, 0}, {0.5, h}, {1.5, h}}, {{0, 1, 2}, {1, 3, 2}});
  const AdmissibilityData adm = admissibility(m);
  const Eigen::VectorXd f = Eigen::Vector2d(m.areas[0], m.areas[1]);
  const TpfaOperator op = make_tpfa(m, adm, std::vector<double>{1.0, 1.0});
  const Eigen::VectorXd p = direct_solve(assemble_tpfa(m, op, f).matrix, f);
  // Each cell: one interior face at distance 2r, two boundary faces at distance r; r = inradius.
  const double r = std::sqrt(3.0) / 6.0;
  Eigen::Matrix2d a;
  a << 2.0 / r + 1.0 / (2 * r), -1.0 / (2 * r), -1.0 / (2 * r), 2.0 / r + 1.0 / (2 * r);
  const Eigen::Vector2d expected = a.lu().solve(f);
  CHECK((p - expected).norm() <= 1e-14 * expected.norm());
  const Eigen::VectorXd div = flux_divergence(m, tpfa_fluxes(m, op, p));
  CHECK((div - f).cwiseAbs().maxCoeff() <= 1e-12 * f.cwiseAbs().maxCoeff());
}

TEST_CASE("two-point fluxes")
{
  const Mesh m = rectangle_grid(2, 1, 0.0, 2.0, 0.0, 1.0);
  const AdmissibilityData adm = admissibility(m);
  const TpfaOperator op = make_tpfa(m, adm, std::vector<double>{1.0, 1.0});
  const FaceFluxVector u = tpfa_fluxes(m, op, Eigen::Vector2d(1.0, 0.0));
  for (int f = 0; f < m.num_faces(); f++)
  {
    const Face &F = m.faces[f];
    if (!F.boundary())
    {
      CHECK(u[f] == doctest::Approx(1.0));
    }
    else if (F.left == 0)
    {
      CHECK(u[f] == doctest::Approx(F.length / adm.distance[f]));
    }
  }
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const Mesh g = triangle_grid(4);
  const AdmissibilityData ga = admissibility(g);
  const TpfaOperator gop = make_tpfa(g, ga, std::vector<double>(g.num_cells(), 1.0));
  Eigen::VectorXd p(g.num_cells());
  for (int K = 0; K < p.size(); K++)
  {
    p[K] = d(rng);
  }
  CHECK((tpfa_fluxes(g, gop, -p) + tpfa_fluxes(g, gop, p)).norm() < 1e-14);
}

TEST_CASE("two-point scheme reproduces affine potentials at circumcenters")
{
  const Mesh m = triangle_grid(6);
  const AdmissibilityData adm = admissibility(m);
  const TpfaOperator op = make_tpfa(m, adm, std::vector<double>(m.num_cells(), 1.0), affine);
  const LinearSystem sys = assemble_tpfa(m, op, Eigen::VectorXd::Zero(m.num_cells()));
  const Eigen::VectorXd p = direct_solve(sys.matrix, sys.rhs);
  for (int K = 0; K < m.num_cells(); K++)
  {
    CHECK(std::abs(p[K] - affine(adm.points[K])) < 1e-12);
  }
  const FaceFluxVector u = tpfa_fluxes(m, op, p);
  for (int f = 0; f < m.num_faces(); f++)
  {
    CHECK(std::abs(u[f] + affine_gradient.dot(m.faces[f].normal) * m.faces[f].length) < 1e-12);
  }
}

TEST_CASE("tensor diffusion must be scalar for two-point fluxes")
{
  const Mesh m = triangle_grid(2);
  std::vector<Eigen::Matrix2d> k(m.num_cells(), Eigen::Matrix2d::Identity());
  CHECK_NOTHROW(make_tpfa(m, admissibility(m), k));
  k[3](0, 1) = k[3](1, 0) = 0.5;
  CHECK(error_code([&] { make_tpfa(m, admissibility(m), k); }) == ErrorCode::TensorNotSupported);
}

TEST_CASE("hybridized mixed scheme")
{
  SUBCASE("single square, zero data")
  {
    const Mesh m = rectangle_grid(1, 1);
    const HmfeSolution s = solve_hmfe(m, Eigen::VectorXd::Zero(1));
    CHECK(s.p.norm() == 0.0);
    CHECK(s.u.norm() == 0.0);
  }
  SUBCASE("2x2 grid with unit source matches the saddle-point system")
  {
    const Mesh m = rectangle_grid(2, 2);
    const Eigen::VectorXd f = Eigen::VectorXd::Constant(4, 0.25);
    const HmfeSystem sys = assemble_hmfe(m, mfe_matrices(m), f);
    CHECK(is_symmetric(sys.system.matrix));
    const HmfeSolution s = hmfe_recover(m, sys, direct_solve(sys.system.matrix, sys.system.rhs));
    CHECK((flux_divergence(m, s.u) - f).cwiseAbs().maxCoeff() <= 1e-11);
    const SaddleSolution dense = solve_saddle_dense(m, mfe_matrices(m), f);
    CHECK((dense.u - s.u).norm() <= 1e-12);
    CHECK((dense.p - s.p).norm() <= 1e-12);
  }
  SUBCASE("multipliers agree from both sides of each face")
  {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (const Mesh &m : {triangle_grid(4), rectangle_grid(3, 4)})
    {
      Eigen::VectorXd f(m.num_cells());
      for (int K = 0; K < f.size(); K++)
      {
        f[K] = d(rng);
      }
      const std::vector<Eigen::MatrixXd> a = mfe_matrices(m);
      const HmfeSystem sys = assemble_hmfe(m, a, f);
      const HmfeSolution s = hmfe_recover(m, sys, direct_solve(sys.system.matrix, sys.system.rhs));
      for (int K = 0; K < m.num_cells(); K++)
      {
        const Eigen::VectorXd lam = hmfe_cell_multipliers(m, K, a[K], s);
        for (int i = 0; i < m.num_cell_faces(K); i++)
        {
          CHECK(std::abs(lam[i] - s.multipliers[m.cell_faces[K][i]]) < 1e-11);
        }
      }
    }
  }
  SUBCASE("affine potentials are reproduced in the mean")
  {
    for (const Mesh &m : {triangle_grid(4), rectangle_grid(3, 3)})
    {
      const HmfeSolution s = solve_hmfe(m, Eigen::VectorXd::Zero(m.num_cells()), affine);
      for (int K = 0; K < m.num_cells(); K++)
      {
        CHECK(std::abs(s.p[K] - affine(m.centroids[K])) < 1e-12);
      }
      for (int f = 0; f < m.num_faces(); f++)
      {
        CHECK(std::abs(s.u[f] + affine_gradient.dot(m.faces[f].normal) * m.faces[f].length) < 1e-12);
      }
    }
  }
}

TEST_CASE("singular element matrices are rejected")
{
  const Mesh m = rectangle_grid(1, 1);
  std::vector<Eigen::MatrixXd> a{Eigen::MatrixXd::Zero(4, 4)};
  CHECK(error_code([&] { assemble_hmfe(m, a, Eigen::VectorXd::Zero(1)); }) == ErrorCode::SingularElementMatrix);
}
