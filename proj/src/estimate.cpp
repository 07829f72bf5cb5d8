#include "adaptfv/estimate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "adaptfv/errors.hpp"
#include "adaptfv/parallel.hpp"

namespace adaptfv
{

namespace
{

constexpr double clamp_tolerance = 1e-12;
constexpr double equilibration_tolerance = 1e-9;
constexpr int singular_depth = 12;
constexpr int smooth_depth = 4;
constexpr double quadrature_tolerance = 1e-8;

bool touches(const Triangle &t, const Vec2 &x)
{
  Eigen::Matrix2d m;
  m.col(0) = t[1] - t[0];
  m.col(1) = t[2] - t[0];
  const Vec2 l = m.inverse() * (x - t[0]);
  const double eps = 1e-12;
  return l.x() >= -eps && l.y() >= -eps && l.x() + l.y() <= 1.0 + eps;
}

// Degree-5 rule: integral and integral of the absolute value.
std::pair<double, double> rule5(const Triangle &t, const std::function<double(const Vec2 &)> &f)
{
  const QuadRule &q = quad_rule(5);
  const double area = std::abs(signed_area(t));
  double sum = 0.0, abs_sum = 0.0;
  for (std::size_t i = 0; i < q.weights.size(); i++)
  {
    const double v = f(map_point(t, q.points[i]));
    sum += q.weights[i] * v;
    abs_sum += q.weights[i] * std::abs(v);
  }
  return {area * sum, area * abs_sum};
}

// Split into four children while they disagree with their parent relative to
// the integral of |f|. Triangles containing the singular point are always split.
double refine_integral(const Triangle &t, double whole, const std::function<double(const Vec2 &)> &f,
                       const std::optional<Vec2> &singular, int singular_budget, int smooth_budget)
{
  const bool at_singular = singular && touches(t, *singular);
  if ((at_singular ? singular_budget : smooth_budget) == 0)
  {
    return whole;
  }
  const Vec2 m01 = 0.5 * (t[0] + t[1]), m12 = 0.5 * (t[1] + t[2]), m20 = 0.5 * (t[2] + t[0]);
  const std::array<Triangle, 4> children{Triangle{t[0], m01, m20}, Triangle{m01, t[1], m12},
                                         Triangle{m20, m12, t[2]}, Triangle{m01, m12, m20}};
  std::array<double, 4> parts;
  double sum = 0.0, scale = 0.0;
  for (int c = 0; c < 4; c++)
  {
    const auto [value, magnitude] = rule5(children[c], f);
    parts[c] = value;
    sum += value;
    scale += magnitude;
  }
  if (!at_singular && std::abs(sum - whole) <= quadrature_tolerance * scale)
  {
    return sum;
  }
  double refined = 0.0;
  for (int c = 0; c < 4; c++)
  {
    refined += refine_integral(children[c], parts[c], f, singular, singular_budget - 1, smooth_budget - 1);
  }
  return refined;
}

double integrate_graded(const Triangle &t, const std::function<double(const Vec2 &)> &f,
                        const std::optional<Vec2> &singular, int smooth_budget = 0)
{
  return refine_integral(t, rule5(t, f).first, f, singular, singular_depth, smooth_budget);
}

double integrate_cell(const Submesh &s, const std::function<double(const Vec2 &)> &f,
                      const std::optional<Vec2> &singular)
{
  double sum = 0.0;
  for (int t = 0; t < s.num_triangles(); t++)
  {
    sum += integrate_graded(s.triangle(t), f, singular);
  }
  return sum;
}

// U^t A U, Z^t S Z and U^t Z_ext - D |K|^{-1} 1^t M Z.
struct QuadraticParts
{
  double flux = 0.0;
  double potential = 0.0;
  double cross = 0.0;
};

QuadraticParts quadratic_parts(const Eigen::VectorXd &u_ext, const Eigen::VectorXd &z,
                               const Eigen::VectorXd &z_ext, double divergence, double area,
                               const CellLocalMatrices &m)
{
  QuadraticParts q;
  q.flux = u_ext.dot(m.a_mfe * u_ext);
  q.potential = z.dot(m.s_fe * z);
  q.cross = u_ext.dot(z_ext) - divergence / area * (m.m_fe * z).sum();
  return q;
}

double clamp_square(double value, double scale)
{
  if (value >= 0.0)
  {
    return value;
  }
  if (value < -clamp_tolerance * scale)
  {
    throw Error(ErrorCode::NegativeEstimate,
                "squared estimator " + std::to_string(value) + " is below round-off of scale " +
                    std::to_string(scale));
  }
  return 0.0;
}

}  // namespace

double EstimateBreakdown::total() const
{
  return total_sp + total_lin + total_alg + total_rem + (osc_in_sp ? 0.0 : total_osc);
}

Eigen::VectorXd EstimateBreakdown::indicator() const
{
  Eigen::VectorXd eta = sp;
  auto add = [&eta](const Eigen::VectorXd &v) {
    if (v.size() == eta.size())
    {
      eta += v;
    }
  };
  add(lin);
  add(alg);
  add(rem);
  if (!osc_in_sp)
  {
    add(osc);
  }
  return eta;
}

Eigen::VectorXd cell_integrals(const Mesh &mesh, const Problem &problem)
{
  Eigen::VectorXd out(mesh.num_cells());
  const auto f = [&problem](const Vec2 &x) { return problem.source(x); };
  parallel_for(mesh.num_cells(), [&](int K) {
    out[K] = integrate_cell(mesh.submeshes[K], f, problem.singular_point);
  });
  return out;
}

Eigen::VectorXd oscillation(const Mesh &mesh, const Problem &problem)
{
  Eigen::VectorXd out(mesh.num_cells());
  parallel_for(mesh.num_cells(), [&](int K) {
    const Submesh &s = mesh.submeshes[K];
    const auto f = [&problem](const Vec2 &x) { return problem.source(x); };
    const double mean = integrate_cell(s, f, problem.singular_point) / mesh.areas[K];
    const double l2 = integrate_cell(
        s,
        [&](const Vec2 &x) {
          const double d = problem.source(x) - mean;
          return d * d;
        },
        problem.singular_point);
    out[K] = mesh.diameters[K] / M_PI * std::sqrt(std::max(l2, 0.0));
  });
  return out;
}

EstimateBreakdown estimate_poisson(const Mesh &mesh, const GlobalSubmesh &gsm, const RT0Field &u,
                                   const P2Potential &s, const Eigen::VectorXd &f,
                                   const Eigen::VectorXd &osc, const std::vector<double> &k)
{
  const int nc = mesh.num_cells();
  double fmax = f.cwiseAbs().maxCoeff();
  double umax = 0.0;
  for (int K = 0; K < nc; K++)
  {
    for (std::size_t t = 0; t < u.cells[K].size(); t++)
    {
      const int g = gsm.first_triangle[K] + static_cast<int>(t);
      const Triangle tri = gsm.triangle(g);
      for (int v = 0; v < 3; v++)
      {
        umax = std::max(umax, u.cells[K][t](tri[v]).norm() * mesh.diameters[K]);
      }
    }
  }
  const double tol = equilibration_tolerance * std::max({fmax, umax, 1e-300});
  for (int K = 0; K < nc; K++)
  {
    for (const RT0Local &piece : u.cells[K])
    {
      if (std::abs(piece.divergence() * mesh.areas[K] - f[K]) > tol)
      {
        throw Error(ErrorCode::NotEquilibrated,
                    "flux divergence on cell " + std::to_string(K) + " does not match the source");
      }
    }
  }

  EstimateBreakdown est;
  est.sp.resize(nc);
  est.osc = osc;
  est.lin = est.alg = est.rem = Eigen::VectorXd::Zero(nc);
  parallel_for(nc, [&](int K) {
    const double kk = k.empty() ? 1.0 : k[K];
    double sum = 0.0;
    for (std::size_t t = 0; t < u.cells[K].size(); t++)
    {
      const int g = gsm.first_triangle[K] + static_cast<int>(t);
      const Triangle tri = gsm.triangle(g);
      const RT0Local &piece = u.cells[K][t];
      sum += integrate(
          tri,
          [&](const Vec2 &x) {
            return (piece(x) + kk * p2_gradient(tri, s.values[g], x)).squaredNorm() / kk;
          },
          2);
    }
    est.sp[K] = std::sqrt(sum + osc[K] * osc[K] / kk);
  });
  est.total_sp = root_sum_squares(est.sp);
  est.total_osc = root_sum_squares(osc);
  est.osc_in_sp = true;
  return est;
}

double estimate_darcy_matrix(const Eigen::VectorXd &u_ext, const Eigen::VectorXd &z,
                             const Eigen::VectorXd &z_ext, double divergence, double area,
                             const CellLocalMatrices &m, double cross_weight)
{
  const QuadraticParts q = quadratic_parts(u_ext, z, z_ext, divergence, area, m);
  const double value = q.flux + q.potential + 2.0 * cross_weight * q.cross;
  return clamp_square(value, q.flux + q.potential);
}

EstimateBreakdown estimate_darcy(const Mesh &mesh, const std::vector<CellLocalMatrices> &matrices,
                                 const FaceFluxVector &u, const PointValues &z,
                                 const Eigen::VectorXd &divergence, const Eigen::VectorXd &osc,
                                 const std::vector<double> &k)
{
  const int nc = mesh.num_cells();
  EstimateBreakdown est;
  est.sp.resize(nc);
  est.osc = osc;
  est.lin = est.alg = est.rem = Eigen::VectorXd::Zero(nc);
  parallel_for(nc, [&](int K) {
    const double kk = k.empty() ? 1.0 : k[K];
    const double sq = estimate_darcy_matrix(cell_exterior(mesh, K, u), gather_points(mesh, K, z),
                                            gather_faces(mesh, K, z), divergence[K], mesh.areas[K],
                                            matrices[K]);
    est.sp[K] = std::sqrt(sq + osc[K] * osc[K] / kk);
  });
  est.total_sp = root_sum_squares(est.sp);
  est.total_osc = root_sum_squares(osc);
  est.osc_in_sp = true;
  return est;
}

EstimateBreakdown estimate_nonlinear(const Mesh &mesh, const std::vector<CellLocalMatrices> &unit,
                                     const ComponentFluxes &flux, const PointValues &z,
                                     const Eigen::VectorXd &osc, const EstimatorConfig &config)
{
  if (!(config.lower > 0.0) || !(config.upper >= config.lower) || !(config.domain_diameter > 0.0))
  {
    throw Error(ErrorCode::MissingConfig, "nonlinear estimator needs c, C and the domain diameter");
  }
  const double c = config.lower, C = config.upper;
  const double flux_weight = C * C / c;
  const double potential_weight = C / (c * c);
  const double cross_weight = C / c;
  const double rem_weight = C / std::sqrt(c) * config.friedrichs * config.domain_diameter;
  const double osc_weight = C / std::sqrt(c);

  const int nc = mesh.num_cells();
  EstimateBreakdown est;
  est.sp.resize(nc);
  est.lin.resize(nc);
  est.alg.resize(nc);
  est.rem.resize(nc);
  est.osc = Eigen::VectorXd::Zero(nc);
  est.osc_in_sp = false;
  parallel_for(nc, [&](int K) {
    const Eigen::VectorXd u = cell_exterior(mesh, K, flux.u);
    const QuadraticParts q = quadratic_parts(u, gather_points(mesh, K, z), gather_faces(mesh, K, z),
                                             u.sum(), mesh.areas[K], unit[K]);
    const double scaled_flux = flux_weight * q.flux;
    const double scaled_potential = potential_weight * q.potential;
    est.sp[K] = std::sqrt(clamp_square(scaled_flux + scaled_potential + 2.0 * cross_weight * q.cross,
                                       scaled_flux + scaled_potential));
    const Eigen::VectorXd ul = cell_exterior(mesh, K, flux.lin);
    const Eigen::VectorXd ua = cell_exterior(mesh, K, flux.alg);
    est.lin[K] = std::sqrt(std::max(flux_weight * ul.dot(unit[K].a_mfe * ul), 0.0));
    est.alg[K] = std::sqrt(std::max(flux_weight * ua.dot(unit[K].a_mfe * ua), 0.0));
    est.rem[K] = rem_weight / std::sqrt(mesh.areas[K]) * std::abs(flux.residual[K]);
    if (!config.ignore_oscillation)
    {
      est.osc[K] = osc_weight * osc[K];
    }
  });
  est.total_sp = root_sum_squares(est.sp);
  est.total_lin = root_sum_squares(est.lin);
  est.total_alg = root_sum_squares(est.alg);
  est.total_rem = root_sum_squares(est.rem);
  est.total_osc = root_sum_squares(est.osc);
  return est;
}

Eigen::VectorXd exact_energy_error(const Mesh &mesh, const GlobalSubmesh &gsm, const Problem &problem,
                                   const RT0Field &u, ErrorWeight weight)
{
  const double w = weight == ErrorWeight::inverse_diffusion ? 1.0 / problem.k : problem.law.lower();
  Eigen::VectorXd out(mesh.num_cells());
  parallel_for(mesh.num_cells(), [&](int K) {
    double sum = 0.0;
    for (std::size_t t = 0; t < u.cells[K].size(); t++)
    {
      const RT0Local &piece = u.cells[K][t];
      sum += integrate_graded(
          gsm.triangle(gsm.first_triangle[K] + static_cast<int>(t)),
          [&](const Vec2 &x) { return (problem.flux(x) - piece(x)).squaredNorm(); },
          problem.singular_point, smooth_depth);
    }
    out[K] = std::sqrt(w * std::max(sum, 0.0));
  });
  return out;
}

double root_sum_squares(const Eigen::VectorXd &v)
{
  return v.norm();
}

double effectivity(double estimate, double error)
{
  if (!(error > 0.0))
  {
    throw Error(ErrorCode::ZeroError, "effectivity index needs a positive error");
  }
  return estimate / error;
}

}  // namespace adaptfv
