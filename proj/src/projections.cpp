#include "atc/projections.hpp"

#include <cmath>
#include <numbers>
#include "atc/calculus.hpp"
#include "atc/errors.hpp"
#include "atc/fft.hpp"

namespace atc
{

Field gamma1_fourier(const Field &p)
{
  require_layout(p, Layout::Vector, "gamma1_fourier");
  const Grid &g = p.grid();
  std::vector<int> ext = g.planar() ? std::vector<int>{g.dim(1), g.dim(0)}
                                    : std::vector<int>{g.dim(2), g.dim(1), g.dim(0)};
  const std::size_t N = g.node_count();
  std::vector<std::vector<cplx>> hat(3);
  fft::DftPlan plan(ext);
  for (int a = 0; a < 3; a++)
  {
    for (std::size_t n = 0; n < N; n++)
      plan.data()[n] = p(n, a);
    plan.forward();
    hat[a].assign(plan.data(), plan.data() + N);
  }
  std::vector<cplx> proj[3];
  for (int a = 0; a < 3; a++)
    proj[a].assign(N, cplx(0.0));
  for (int k = 0; k < g.dim(2); k++)
    for (int j = 0; j < g.dim(1); j++)
      for (int i = 0; i < g.dim(0); i++)
      {
        std::size_t n = g.index(i, j, k);
        double kv[3] = {spectral_wavenumber(i, g.dim(0), g.spacing()),
                        spectral_wavenumber(j, g.dim(1), g.spacing()),
                        g.planar() ? 0.0 : spectral_wavenumber(k, g.dim(2), g.spacing())};
        double k2 = kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
        if (k2 == 0.0)
          continue;
        cplx kp = kv[0] * hat[0][n] + kv[1] * hat[1][n] + kv[2] * hat[2][n];
        for (int a = 0; a < 3; a++)
          proj[a][n] = kv[a] * kp / k2;
      }
  Field out = Field::vector(g);
  const double scale = 1.0 / double(N);
  for (int a = 0; a < 3; a++)
  {
    std::copy(proj[a].begin(), proj[a].end(), plan.data());
    plan.backward();
    for (std::size_t n = 0; n < N; n++)
      out(n, a) = plan.data()[n] * scale;
  }
  return out;
}

DirichletPoisson::DirichletPoisson(const Grid &grid, const Box &domain)
  : grid_(grid), domain_(domain)
{
  require_inside(grid, domain, "poisson_dirichlet");
  const int dim = grid.dimension();
  for (int a = dim - 1; a >= 0; a--)
  {
    int m = domain.hi[a] - domain.lo[a] - 1;
    if (m < 1)
      throw InvalidArgument("poisson_dirichlet: box has no interior nodes along an axis");
    extents_.push_back(m);
  }
  plan_ = std::make_unique<fft::Dst1Plan>(extents_);
  // eigenvalues in the same (slowest-first) ordering as the transform buffer
  const double h = grid.spacing();
  std::vector<std::vector<double>> lam(dim);
  double norm = 1.0;
  for (int s = 0; s < dim; s++)
  {
    int m = extents_[s];
    norm *= 2.0 * (m + 1);
    for (int q = 1; q <= m; q++)
    {
      double sn = std::sin(std::numbers::pi * q / (2.0 * (m + 1)));
      lam[s].push_back(-4.0 / (h * h) * sn * sn);
    }
  }
  inv_eig_.resize(plan_->size());
  std::size_t idx = 0;
  if (dim == 3)
  {
    for (int a = 0; a < extents_[0]; a++)
      for (int b = 0; b < extents_[1]; b++)
        for (int c = 0; c < extents_[2]; c++)
          inv_eig_[idx++] = 1.0 / ((lam[0][a] + lam[1][b] + lam[2][c]) * norm);
  }
  else
  {
    for (int a = 0; a < extents_[0]; a++)
      for (int b = 0; b < extents_[1]; b++)
        inv_eig_[idx++] = 1.0 / ((lam[0][a] + lam[1][b]) * norm);
  }
}

DirichletPoisson::~DirichletPoisson() = default;

bool DirichletPoisson::is_interior(const Index3 &n) const
{
  for (int a = 0; a < grid_.dimension(); a++)
    if (n[a] <= domain_.lo[a] || n[a] >= domain_.hi[a])
      return false;
  return true;
}

void DirichletPoisson::solve(const std::vector<cplx> &rhs, std::vector<cplx> &V)
{
  if (rhs.size() != grid_.node_count())
    throw InvalidArgument("poisson_dirichlet: rhs length does not match grid");
  V.assign(grid_.node_count(), cplx(0.0));
  const bool planar = grid_.planar();
  const int k0 = planar ? 0 : domain_.lo[2] + 1, k1 = planar ? 0 : domain_.hi[2] - 1;
  for (int part = 0; part < 2; part++)
  {
    double *buf = plan_->data();
    std::size_t idx = 0;
    for (int k = k0; k <= k1; k++)
      for (int j = domain_.lo[1] + 1; j < domain_.hi[1]; j++)
        for (int i = domain_.lo[0] + 1; i < domain_.hi[0]; i++)
        {
          cplx r = rhs[grid_.index(i, j, k)];
          buf[idx++] = part == 0 ? r.real() : r.imag();
        }
    plan_->execute();
    for (std::size_t q = 0; q < plan_->size(); q++)
      buf[q] *= inv_eig_[q];
    plan_->execute();
    idx = 0;
    for (int k = k0; k <= k1; k++)
      for (int j = domain_.lo[1] + 1; j < domain_.hi[1]; j++)
        for (int i = domain_.lo[0] + 1; i < domain_.hi[0]; i++)
        {
          cplx &v = V[grid_.index(i, j, k)];
          if (part == 0)
            v = cplx(buf[idx++], 0.0);
          else
            v = cplx(v.real(), buf[idx++]);
        }
  }
}

Field poisson_dirichlet(const Field &rhs, const Box &domain)
{
  require_layout(rhs, Layout::Scalar, "poisson_dirichlet");
  DirichletPoisson solver(rhs.grid(), domain);
  std::vector<cplx> V;
  solver.solve(rhs.data(), V);
  Field out = Field::scalar(rhs.grid());
  out.data() = std::move(V);
  return out;
}

Field gamma1_dirichlet(const Field &p, DirichletPoisson &solver, Field *potential)
{
  require_layout(p, Layout::Vector, "gamma1_dirichlet");
  // V solves L V = D p on the interior; e = G V equals -grad of the potential -V.
  Field dp = div(p, Diff::Backward);
  std::vector<cplx> V;
  solver.solve(dp.data(), V);
  Field phi = Field::scalar(p.grid());
  phi.data() = std::move(V);
  Field e = grad(phi, Diff::Forward);
  if (potential)
  {
    *potential = phi;
    *potential *= -1.0;
  }
  return e;
}

Field gamma1_dirichlet(const Field &p, const Box &domain)
{
  DirichletPoisson solver(p.grid(), domain);
  return gamma1_dirichlet(p, solver);
}

Field apply_projection(const ProjectionKind &kind, const Field &p)
{
  if (kind.kind == ProjectionKind::FourierPeriodic)
    return gamma1_fourier(p);
  return gamma1_dirichlet(p, kind.domain);
}

}  // namespace atc
