#include "atc/polarizability.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include "atc/calculus.hpp"
#include "atc/errors.hpp"
#include "atc/json_format.hpp"
#include "atc/kernel.hpp"
#include "atc/krylov.hpp"

namespace atc
{

namespace
{

constexpr double pi = std::numbers::pi;

void validate(const InclusionProblem &pb)
{
  const Grid &g = pb.epsilon.grid();
  if (g.planar())
    throw InvalidArgument("solve_quasistatic: needs a 3D grid");
  if (!(pb.epsilon0 > 0))
    throw InvalidArgument("solve_quasistatic: epsilon0 must be positive");
  if ((pb.epsilon.background() - isotropic(pb.epsilon0)).cwiseAbs().maxCoeff() >
      1e-12 * pb.epsilon0)
    throw InvalidArgument("solve_quasistatic: background permittivity must be epsilon0·I");
  if (pb.omega < 0)
    throw InvalidArgument("solve_quasistatic: omega must be non-negative");
  if (pb.omega > 0)
    for (const Mat3c &eps : pb.epsilon.values())
    {
      Mat3c loss = (eps - eps.adjoint()) / cplx(0.0, 2.0);
      Eigen::SelfAdjointEigenSolver<Mat3c> es(loss, Eigen::EigenvaluesOnly);
      if (es.eigenvalues()(0) < -1e-12 * eps.cwiseAbs().maxCoeff())
        throw InvalidArgument("solve_quasistatic: Im(epsilon) must be positive semidefinite");
    }
}

// Edge (n, a) of a grid joins two of its nodes.
void mask_edges(Field &f)
{
  const Grid &g = f.grid();
  for (int k = 0; k < g.dim(2); k++)
    for (int j = 0; j < g.dim(1); j++)
      for (int i = 0; i < g.dim(0); i++)
      {
        const int n[3] = {i, j, k};
        for (int a = 0; a < 3; a++)
          if (n[a] == g.dim(a) - 1)
            f.at(i, j, k, a) = 0.0;
      }
}

int add_potential_kernel(Convolver &conv, double h, double epsilon0)
{
  // Δ_h φ = q  <=>  φ = -h² Σ g(n - m) q_m with -Δ g = δ at unit spacing
  return conv.add_kernel([h, epsilon0](const Index3 &d) {
    return cplx(-h * h * lattice_green(d[0], d[1], d[2]) / epsilon0);
  });
}

}  // namespace

QuasistaticSolution solve_quasistatic(const InclusionProblem &problem,
                                      const QuasistaticOptions &opts)
{
  validate(problem);
  const Grid &grid = problem.epsilon.grid();
  const double h = grid.spacing();
  const double eps0 = problem.epsilon0;
  QuasistaticSolution sol;
  Box support;
  if (!problem.epsilon.support(support))
  {
    sol.local = grid;
    if (opts.full_fields)
    {
      sol.e_s = sol.d_s = Field(grid, Layout::Vector);
      sol.phi_s = Field::scalar(grid);
    }
    return sol;
  }
  int diameter = 0;
  for (int a = 0; a < 3; a++)
    diameter = std::max(diameter, support.extent(a) - 1);
  for (int a = 0; a < 3; a++)
    if (support.lo[a] < std::max(diameter, 2) || grid.dim(a) - 1 - support.hi[a] < std::max(diameter, 2))
      throw InvalidArgument("solve_quasistatic: support needs padding of at least its diameter (" +
                            std::to_string(diameter) + " nodes) from the grid edge");
  Box box = support;
  for (int a = 0; a < 3; a++)
  {
    box.lo[a] -= 2;
    box.hi[a] += 2;
  }
  sol.box = box;
  Index3 ext{box.extent(0), box.extent(1), box.extent(2)};
  sol.local = Grid(ext, h, grid.position(box.lo));
  const Grid &loc = sol.local;
  TensorMap eps(loc, problem.epsilon.background());
  for (std::size_t q = 0; q < loc.node_count(); q++)
  {
    Index3 n = loc.unravel(q);
    eps[q] = problem.epsilon[grid.index(n[0] + box.lo[0], n[1] + box.lo[1], n[2] + box.lo[2])];
  }
  CellOperator chi(eps, whole_grid(loc), isotropic(eps0), DiagonalRule::EdgeHarmonic);
  Convolver conv(ext, ext, Index3{0, 0, 0});
  const int kid = add_potential_kernel(conv, h, eps0);

  // e_s produced by a polarization p on the local grid
  Field phi = Field::scalar(loc);
  auto scattered = [&](const Field &p, Field &es) {
    Field q = div(p, Diff::Backward);
    conv.apply(kid, q.data().data(), phi.data().data());
    es = grad(phi, Diff::Forward);
    es *= -1.0;
    mask_edges(es);
  };

  const std::size_t n = loc.node_count() * 3;
  Field xf(loc, Layout::Vector), pf(loc, Layout::Vector), ef(loc, Layout::Vector);
  LinearOperator A = [&](const Eigen::VectorXcd &x, Eigen::VectorXcd &y) {
    std::copy(x.data(), x.data() + n, xf.data().begin());
    chi.apply(xf, pf);
    scattered(pf, ef);
    y = x - Eigen::Map<const Eigen::VectorXcd>(ef.data().data(), n);
  };
  Field e0f(loc, Layout::Vector);
  for (std::size_t q = 0; q < loc.node_count(); q++)
    for (int a = 0; a < 3; a++)
      e0f(q, a) = problem.e0[a];
  mask_edges(e0f);
  Eigen::VectorXcd b = Eigen::Map<const Eigen::VectorXcd>(e0f.data().data(), n);
  Eigen::VectorXcd x = b;
  KrylovOptions ko;
  ko.tol = opts.tol;
  ko.max_iter = opts.max_iter;
  ko.restart = opts.restart;
  ko.label = "solve_quasistatic";
  KrylovResult kr = gmres(A, b, x, ko);
  sol.iterations = kr.iterations;
  sol.residual = kr.residual;
  sol.contraction = kr.contraction();
  sol.e = Field(loc, Layout::Vector);
  std::copy(x.data(), x.data() + n, sol.e.data().begin());
  chi.apply(sol.e, sol.p);

  if (opts.full_fields)
  {
    Convolver big(ext, grid.dims(), Index3{-box.lo[0], -box.lo[1], -box.lo[2]});
    const int bid = add_potential_kernel(big, h, eps0);
    Field q = div(sol.p, Diff::Backward);
    sol.phi_s = Field::scalar(grid);
    big.apply(bid, q.data().data(), sol.phi_s.data().data());
    sol.e_s = grad(sol.phi_s, Diff::Forward);
    sol.e_s *= -1.0;
    mask_edges(sol.e_s);
    sol.d_s = sol.e_s;
    sol.d_s *= eps0;
    for (int a = 0; a < 3; a++)
    {
      std::vector<cplx> comp = sol.p.component(a);
      scatter_box(grid, box, comp, sol.d_s.data(), 3, a, true);
    }
  }
  return sol;
}

Vec3c dipole_moment(const QuasistaticSolution &sol)
{
  Vec3c b = Vec3c::Zero();
  if (sol.p.size() == 0)
    return b;
  const Grid &g = sol.p.grid();
  for (std::size_t q = 0; q < g.node_count(); q++)
    for (int a = 0; a < 3; a++)
      b[a] += sol.p(q, a);
  return b * std::pow(g.spacing(), 3);
}

std::vector<cplx> scattered_potential(const QuasistaticSolution &sol, double epsilon0,
                                      const std::vector<Vec3> &points)
{
  std::vector<cplx> out(points.size(), cplx(0.0));
  if (sol.p.size() == 0)
    return out;
  const Grid &g = sol.p.grid();
  const double h = g.spacing(), vol = h * h * h;
  for (std::size_t q = 0; q < g.node_count(); q++)
  {
    Vec3 base = g.position(g.unravel(q));
    for (int a = 0; a < 3; a++)
    {
      cplx pa = sol.p(q, a);
      if (pa == 0.0)
        continue;
      Vec3 y = base;
      y[a] += 0.5 * h;
      for (std::size_t m = 0; m < points.size(); m++)
      {
        Vec3 r = points[m] - y;
        double R = r.norm();
        out[m] += pa * r[a] / (4 * pi * epsilon0 * R * R * R) * vol;
      }
    }
  }
  return out;
}

Vec3c farfield_dipole_fit(const SphereQuadrature &quad, double radius,
                          const std::vector<cplx> &values, double epsilon0)
{
  if (values.size() != quad.size())
    throw InvalidArgument("farfield_dipole_fit: one sample per quadrature direction expected");
  // model V = β·n /(4π ε0 r²) at x = c + r n
  Mat3 N = Mat3::Zero();
  Vec3c rhs = Vec3c::Zero();
  const double scale = 1.0 / (4 * pi * epsilon0 * radius * radius);
  for (std::size_t i = 0; i < quad.size(); i++)
  {
    const Vec3 &n = quad.directions[i];
    N += quad.weights[i] * scale * scale * n * n.transpose();
    rhs += quad.weights[i] * scale * values[i] * n.cast<cplx>();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(N, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < 1e-8 * es.eigenvalues()(2))
    throw InvalidArgument("farfield_dipole_fit: quadrature too sparse for a dipole fit");
  return N.cast<cplx>().inverse() * rhs;
}

Mat3c polarizability_tensor(InclusionProblem problem, const QuasistaticOptions &opts)
{
  QuasistaticOptions o = opts;
  o.full_fields = false;
  Mat3c alpha;
  for (int a = 0; a < 3; a++)
  {
    problem.e0 = Vec3c::Unit(a);
    alpha.col(a) = dipole_moment(solve_quasistatic(problem, o));
  }
  return alpha;
}

double absorbed_power(const Mat3c &alpha, const Vec3c &e0, double omega)
{
  if (omega < 0)
    throw InvalidArgument("absorbed_power: omega must be non-negative");
  cplx s = 0.0;
  Vec3c b = alpha * e0;
  for (int a = 0; a < 3; a++)
    s += std::conj(e0[a]) * b[a];
  return 0.5 * omega * s.imag();
}

double absorbed_power_volume(const QuasistaticSolution &sol, double omega)
{
  if (sol.p.size() == 0)
    return 0.0;
  cplx s = 0.0;
  for (std::size_t q = 0; q < sol.p.size(); q++)
    s += std::conj(sol.e.data()[q]) * sol.p.data()[q];
  return 0.5 * omega * s.imag() * std::pow(sol.p.grid().spacing(), 3);
}

nlohmann::json to_json(const PolarizabilityResult &r)
{
  nlohmann::json j;
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (int a = 0; a < 3; a++)
  {
    re.push_back({r.alpha(a, 0).real(), r.alpha(a, 1).real(), r.alpha(a, 2).real()});
    im.push_back({r.alpha(a, 0).imag(), r.alpha(a, 1).imag(), r.alpha(a, 2).imag()});
  }
  j["alpha_re"] = re;
  j["alpha_im"] = im;
  j["b"] = to_json(r.b);
  j["W"] = r.absorbed_power;
  return j;
}

cplx clausius_mossotti(double radius, cplx epsilon1, double epsilon0)
{
  return 4 * pi * epsilon0 * std::pow(radius, 3) * (epsilon1 - epsilon0) /
         (epsilon1 + 2 * epsilon0);
}

}  // namespace atc
