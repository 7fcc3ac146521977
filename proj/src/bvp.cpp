#include "atc/bvp.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <limits>
#include "atc/calculus.hpp"
#include "atc/errors.hpp"
#include "atc/field_io.hpp"
#include "atc/json_format.hpp"

namespace atc
{

namespace
{

bool on_boundary(const Grid &grid, const Box &box, const Index3 &n)
{
  for (int a = 0; a < grid.dimension(); a++)
    if (n[a] == box.lo[a] || n[a] == box.hi[a])
      return true;
  return false;
}

void check_domain(const Grid &grid, const Box &box, const char *op)
{
  require_inside(grid, Region(box), op);
  for (int a = 0; a < grid.dimension(); a++)
    if (box.extent(a) < 3)
      throw InvalidArgument(std::string(op) + ": domain needs at least 3 nodes per axis");
}

// Edge (n, a) joins n and n + e_a; it belongs to the box when both ends do.
bool box_edge(const Grid &grid, const Box &box, const Index3 &n, int a)
{
  if (a >= grid.dimension() || !box.contains(n))
    return false;
  return n[a] < box.hi[a];
}

// Everything one needs for repeated solves on the same problem.
struct Workspace
{
  Workspace(const ConductivityProblem &p)
    : problem(p), grid(p.sigma.grid()), op(p.sigma, p.domain), poisson(grid, p.domain)
  {
    sigma_bounds(p, smin, smax);
    sref = p.reference_sigma > 0 ? p.reference_sigma : 0.5 * (smin + smax);
    if (sref < smin * (1 - 1e-12) || sref > smax * (1 + 1e-12))
      throw InvalidArgument("solve_dirichlet: reference conductivity outside [sigma_min, sigma_max]");
    bnodes = boundary_nodes(grid, p.domain);
  }

  DirichletSolution solve(const std::vector<cplx> &bv)
  {
    const Box &box = problem.domain;
    Field Vh = harmonic_lift(grid, box, bv);
    Field u = grad(Vh, Diff::Forward);
    u *= -1.0;
    for (std::size_t idx = 0; idx < grid.node_count(); idx++)
    {
      Index3 n = grid.unravel(idx);
      for (int a = 0; a < 3; a++)
        if (!box_edge(grid, box, n, a))
          u(idx, a) = 0.0;
    }
    DirichletSolution sol;
    Field e = u, Me(grid, Layout::Vector), Vp = Field::scalar(grid);
    double prev = 0.0;
    for (int it = 1;; it++)
    {
      op.apply(e, Me);
      Field p = e;
      for (std::size_t q = 0; q < p.size(); q++)
        p.data()[q] -= Me.data()[q] / sref;
      Field en = u + gamma1_dirichlet(p, poisson, &Vp);
      double nn = en.norm();
      double upd = nn > 0 ? (en - e).norm() / nn : 0.0;
      e = std::move(en);
      sol.iterations = it;
      sol.update = upd;
      if (prev > 0)
        sol.contraction = upd / prev;
      prev = upd;
      if (!std::isfinite(upd))
        throw NonConvergence("solve_dirichlet: iteration produced non-finite values", it, upd,
                             sol.contraction);
      if (upd <= problem.tol)
        break;
      if (it >= problem.max_iter)
        throw NonConvergence("solve_dirichlet: no convergence within max_iter", it, upd,
                             sol.contraction);
    }
    sol.V = Vh + Vp;
    op.apply(e, Me);
    const Field &w = op.edge_weight();
    sol.j = Field(grid, Layout::Vector);
    for (std::size_t q = 0; q < Me.size(); q++)
      if (w.data()[q].real() > 0)
        sol.j.data()[q] = Me.data()[q] / w.data()[q].real();
    sol.e = std::move(e);
    return sol;
  }

  std::vector<cplx> neumann(const DirichletSolution &sol)
  {
    Field Me(grid, Layout::Vector);
    op.apply(sol.e, Me);
    Field d = div(Me, Diff::Backward);
    std::vector<cplx> out;
    out.reserve(bnodes.size());
    for (const Index3 &n : bnodes)
      out.push_back(grid.spacing() * d(grid.index(n), 0));
    return out;
  }

  double power(const DirichletSolution &sol)
  {
    Field Me(grid, Layout::Vector);
    op.apply(sol.e, Me);
    cplx s = 0.0;
    for (std::size_t q = 0; q < Me.size(); q++)
      s += std::conj(sol.e.data()[q]) * Me.data()[q];
    return s.real() * std::pow(grid.spacing(), grid.dimension());
  }

  const ConductivityProblem &problem;
  Grid grid;
  ConductivityOperator op;
  DirichletPoisson poisson;
  double smin = 0, smax = 0, sref = 0;
  std::vector<Index3> bnodes;
};

}  // namespace

void sigma_bounds(const ConductivityProblem &problem, double &sigma_min, double &sigma_max)
{
  const Grid &g = problem.sigma.grid();
  check_domain(g, problem.domain, "solve_dirichlet");
  sigma_min = std::numeric_limits<double>::infinity();
  sigma_max = 0.0;
  for (std::size_t idx : region_nodes(g, Region(problem.domain)))
  {
    const Mat3c &s = problem.sigma[idx];
    if (s.imag().cwiseAbs().maxCoeff() > 0)
      throw InvalidArgument("solve_dirichlet: conductivity must be real");
    Mat3 r = s.real();
    if ((r - r.transpose()).cwiseAbs().maxCoeff() > 1e-12 * r.cwiseAbs().maxCoeff())
      throw InvalidArgument("solve_dirichlet: conductivity must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat3> es(r, Eigen::EigenvaluesOnly);
    if (g.planar())
    {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es2(r.topLeftCorner<2, 2>(),
                                                         Eigen::EigenvaluesOnly);
      sigma_min = std::min(sigma_min, es2.eigenvalues()(0));
      sigma_max = std::max(sigma_max, es2.eigenvalues()(1));
    }
    else
    {
      sigma_min = std::min(sigma_min, es.eigenvalues()(0));
      sigma_max = std::max(sigma_max, es.eigenvalues()(2));
    }
  }
  if (!(sigma_min > 0))
    throw InvalidArgument("solve_dirichlet: conductivity must be positive definite");
}

std::vector<Index3> boundary_nodes(const Grid &grid, const Box &box)
{
  std::vector<Index3> out;
  for (int k = box.lo[2]; k <= box.hi[2]; k++)
    for (int j = box.lo[1]; j <= box.hi[1]; j++)
      for (int i = box.lo[0]; i <= box.hi[0]; i++)
        if (on_boundary(grid, box, {i, j, k}))
          out.push_back({i, j, k});
  return out;
}

Field harmonic_lift(const Grid &grid, const Box &box, const std::vector<cplx> &boundary_V)
{
  check_domain(grid, box, "harmonic_lift");
  std::vector<Index3> nodes = boundary_nodes(grid, box);
  if (boundary_V.size() != nodes.size())
    throw InvalidArgument("harmonic_lift: boundary data length does not match boundary nodes");
  Field B = Field::scalar(grid);
  for (std::size_t b = 0; b < nodes.size(); b++)
    B(grid.index(nodes[b]), 0) = boundary_V[b];
  Field rhs = laplacian(B);
  rhs *= -1.0;
  DirichletPoisson solver(grid, box);
  std::vector<cplx> W;
  solver.solve(rhs.data(), W);
  for (std::size_t q = 0; q < W.size(); q++)
    B.data()[q] += W[q];
  return B;
}

DirichletSolution solve_dirichlet(const ConductivityProblem &problem,
                                  const std::vector<cplx> &boundary_V)
{
  Workspace ws(problem);
  return ws.solve(boundary_V);
}

std::vector<cplx> neumann_data(const ConductivityProblem &problem, const DirichletSolution &sol)
{
  Workspace ws(problem);
  return ws.neumann(sol);
}

DtnMap assemble_dtn(const ConductivityProblem &problem, const DtnOptions &opts)
{
  Workspace ws(problem);
  DtnMap map;
  map.boundary_nodes = ws.bnodes;
  for (const Index3 &n : ws.bnodes)
    map.positions.push_back(ws.grid.position(n));
  const std::size_t nb = ws.bnodes.size();
  if (opts.probe_basis.size() > 0)
  {
    if (std::size_t(opts.probe_basis.rows()) != nb)
      throw InvalidArgument("assemble_dtn: probe basis rows must match boundary node count");
    map.probed = true;
    map.matrix.resize(nb, opts.probe_basis.cols());
    for (Eigen::Index c = 0; c < opts.probe_basis.cols(); c++)
    {
      std::vector<cplx> v(nb);
      for (std::size_t b = 0; b < nb; b++)
        v[b] = opts.probe_basis(b, c);
      std::vector<cplx> f = ws.neumann(ws.solve(v));
      for (std::size_t b = 0; b < nb; b++)
        map.matrix(b, c) = f[b];
    }
    return map;
  }
  if (nb > opts.dense_limit)
    throw InvalidArgument("assemble_dtn: " + std::to_string(nb) +
                          " boundary nodes exceed the dense limit; pass a probe basis");
  map.matrix.resize(nb, nb);
  std::vector<cplx> v(nb, cplx(0.0));
  for (std::size_t c = 0; c < nb; c++)
  {
    v[c] = 1.0;
    std::vector<cplx> f = ws.neumann(ws.solve(v));
    v[c] = 0.0;
    for (std::size_t b = 0; b < nb; b++)
      map.matrix(b, c) = f[b];
  }
  return map;
}

void export_dtn(const DtnMap &map, const std::string &csv_path, const std::string &json_path)
{
  std::string csv;
  char buf[64];
  const bool real = map.matrix.imag().cwiseAbs().maxCoeff() == 0.0;
  for (Eigen::Index r = 0; r < map.matrix.rows(); r++)
  {
    for (Eigen::Index c = 0; c < map.matrix.cols(); c++)
    {
      if (c)
        csv += ',';
      cplx z = map.matrix(r, c);
      if (real)
        std::snprintf(buf, sizeof buf, "%.17g", z.real());
      else
        std::snprintf(buf, sizeof buf, "%.17g%+.17gj", z.real(), z.imag());
      csv += buf;
    }
    csv += '\n';
  }
  write_file_atomic(csv_path, csv);
  nlohmann::json j;
  j["rows"] = map.matrix.rows();
  j["cols"] = map.matrix.cols();
  j["probed"] = map.probed;
  j["complex"] = !real;
  nlohmann::json nodes = nlohmann::json::array(), pos = nlohmann::json::array();
  for (std::size_t b = 0; b < map.boundary_nodes.size(); b++)
  {
    const Index3 &n = map.boundary_nodes[b];
    nodes.push_back({n[0], n[1], n[2]});
    const Vec3 &x = map.positions[b];
    pos.push_back({x.x(), x.y(), x.z()});
  }
  j["nodes"] = nodes;
  j["positions"] = pos;
  write_file_atomic(json_path, dump_json(j));
}

double y_power(const ConductivityProblem &problem, const std::vector<cplx> &v_e)
{
  Workspace ws(problem);
  return ws.power(ws.solve(v_e));
}

double dissipated_power(const ConductivityProblem &problem, const DirichletSolution &sol)
{
  Workspace ws(problem);
  return ws.power(sol);
}

double boundary_power(const ConductivityProblem &problem, const DirichletSolution &sol)
{
  const Grid &g = problem.sigma.grid();
  const Box &box = problem.domain;
  const int dim = g.dimension();
  const double h = g.spacing();
  auto V = [&](Index3 n) { return sol.V(g.index(n), 0); };
  // second-order derivative along axis b at node n, one-sided at the box ends
  auto deriv = [&](const Index3 &n, int b) {
    Index3 m1 = n, m2 = n, p1 = n, p2 = n;
    m1[b] -= 1;
    m2[b] -= 2;
    p1[b] += 1;
    p2[b] += 2;
    if (n[b] == box.lo[b])
      return (-3.0 * V(n) + 4.0 * V(p1) - V(p2)) / (2 * h);
    if (n[b] == box.hi[b])
      return (3.0 * V(n) - 4.0 * V(m1) + V(m2)) / (2 * h);
    return (V(p1) - V(m1)) / (2 * h);
  };
  cplx total = 0.0;
  for (int a = 0; a < dim; a++)
    for (int side = 0; side < 2; side++)
    {
      const double sign = side ? 1.0 : -1.0;
      Box face = box;
      face.lo[a] = face.hi[a] = side ? box.hi[a] : box.lo[a];
      for (std::size_t idx : region_nodes(g, Region(face)))
      {
        Index3 n = g.unravel(idx);
        double w = std::pow(h, dim - 1);
        for (int b = 0; b < dim; b++)
          if (b != a && (n[b] == box.lo[b] || n[b] == box.hi[b]))
            w *= 0.5;
        Mat3 s = problem.sigma[idx].real();
        cplx flux = 0.0;
        for (int b = 0; b < dim; b++)
          flux += s(a, b) * deriv(n, b);
        total += std::conj(V(n)) * sign * flux * w;
      }
    }
  return total.real();
}

}  // namespace atc
