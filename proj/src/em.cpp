#include "atc/em.hpp"

#include <cmath>
#include <numbers>
#include "atc/calculus.hpp"
#include "atc/errors.hpp"
#include "atc/field_io.hpp"
#include "atc/integrals.hpp"
#include "atc/json_format.hpp"
#include "atc/kernel.hpp"
#include "atc/krylov.hpp"

namespace atc
{

namespace
{

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

Mat3c imag_part(const Mat3c &m)
{
  return (m - m.adjoint()) / cplx(0.0, 2.0);
}

void validate(const EmMedium &m, const EmPlaneWave &pw)
{
  const Grid &g = m.epsilon.grid();
  if (g.planar())
    throw InvalidArgument("solve_em_scattering: three-dimensional grid required");
  if (m.mu.grid() != g)
    throw InvalidArgument("solve_em_scattering: epsilon and mu live on different grids");
  const double e0 = m.eps0(), m0 = m.mu0();
  if (!(e0 > 0.0) || (m.epsilon.background() - isotropic(e0)).norm() > 1e-14 * e0)
    throw InvalidArgument("solve_em_scattering: background permittivity must be eps0 I, eps0 > 0");
  if (!(m0 > 0.0) || (m.mu.background() - isotropic(m0)).norm() > 1e-14 * m0)
    throw InvalidArgument("solve_em_scattering: background permeability must be mu0 I, mu0 > 0");
  if (!(m.omega > 0.0))
    throw InvalidArgument("solve_em_scattering: omega must be positive");
  if (!m.mu.uniform())
    throw UnsupportedMedium("solve_em_scattering: mu differs from mu0; only nonmagnetic inclusions are solved");
  const double k0 = m.k0();
  if (std::abs(pw.k0() - k0) > 1e-10 * k0)
    throw InvalidArgument("solve_em_scattering: |k0_vec| differs from omega sqrt(eps0 mu0)");
  if (std::abs(pw.k0_vec.cast<cplx>().dot(pw.e0)) > 1e-12 * k0 * pw.e0.norm())
    throw InvalidArgument("solve_em_scattering: e0 must be orthogonal to k0_vec");
}

void check_passive(const EmMedium &m, const Box &box)
{
  const Grid &g = m.epsilon.grid();
  for (int k = box.lo[2]; k <= box.hi[2]; k++)
    for (int j = box.lo[1]; j <= box.hi[1]; j++)
      for (int i = box.lo[0]; i <= box.hi[0]; i++)
      {
        const Mat3c &e = m.epsilon[g.index(i, j, k)];
        Eigen::SelfAdjointEigenSolver<Mat3c> es(imag_part(e), Eigen::EigenvaluesOnly);
        if (es.eigenvalues()(0) < -1e-14 * e.norm())
          throw InvalidArgument("solve_em_scattering: active permittivity (Im eps not PSD)");
      }
}

int dyad_id(int a, int b)
{
  static const int table[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  return table[a][b];
}

// h³(k0² g δ_ab + ∂_a∂_b g) as ids 0..5; with `curl`, h³∂_a g as 6..8.
void add_kernels(Convolver &conv, const Helmholtz &H, bool curl)
{
  const double vol = H.h * H.h * H.h, k2 = H.k * H.k;
  for (int a = 0; a < 3; a++)
    for (int b = a; b < 3; b++)
      conv.add_kernel([&, a, b](const Index3 &d) {
        cplx v = H.hessian(d, a, b);
        if (a == b)
          v += k2 * H.g(d);
        return vol * v;
      });
  if (curl)
    for (int a = 0; a < 3; a++)
      conv.add_kernel([&, a](const Index3 &d) { return vol * H.grad(d, a); });
}

// e^s_a = Σ_b G_ab * π_b; with `curl`, also (∇×e^s)_a = k0² Σ ε_abc ∂_b g * π_c.
void radiate(Convolver &conv, double k0, const std::vector<cplx> pi_[3], std::vector<cplx> e[3],
             std::vector<cplx> *c)
{
  std::vector<cplx> sp[3], acc;
  for (int b = 0; b < 3; b++)
    conv.forward(pi_[b].data(), sp[b]);
  const std::size_t nt = conv.target_size();
  for (int a = 0; a < 3; a++)
  {
    acc.assign(conv.spectrum_size(), 0.0);
    for (int b = 0; b < 3; b++)
      conv.accumulate(dyad_id(a, b), sp[b], acc);
    e[a].resize(nt);
    conv.backward(acc, e[a].data());
  }
  if (!c)
    return;
  const double k2 = k0 * k0;
  for (int a = 0; a < 3; a++)
  {
    const int b = (a + 1) % 3, cc = (a + 2) % 3;
    acc.assign(conv.spectrum_size(), 0.0);
    conv.accumulate(6 + b, sp[cc], acc, k2);
    conv.accumulate(6 + cc, sp[b], acc, -k2);
    c[a].resize(nt);
    conv.backward(acc, c[a].data());
  }
}

Vec3c cross(const Vec3 &a, const Vec3c &b)
{
  return atc::cross(a.cast<cplx>(), b);
}

// Nonzero-contrast reach from `center`, for the shell check.
double contrast_reach(const EmSolution &sol, const Vec3 &center)
{
  double reach = 0.0;
  for (std::size_t q = 0; q < sol.local.node_count(); q++)
    if (sol.chi[q] != Mat3c::Zero())
      reach = std::max(reach, (sol.local.position(sol.local.unravel(q)) - center).norm());
  return reach;
}

void require_shell(const EmSolution &sol, double radius, const ShellOptions &opts, const char *op)
{
  const std::vector<double> radii = shell_radii(radius, opts.shell_fraction, opts.radii);
  require_strictly_interior(sol.grid, Ball{opts.center, radii.back()}, 1.0, op);
  if (sol.has_support && radii.front() < contrast_reach(sol, opts.center) + sol.grid.spacing())
    throw InvalidArgument(std::string(op) + ": shell reaches into the inclusion");
}

struct VectorWaves
{
  SphericalWaves c[3];

  Vec3c outgoing(const Vec3 &n) const
  {
    return Vec3c(c[0].outgoing_amplitude(n), c[1].outgoing_amplitude(n),
                 c[2].outgoing_amplitude(n));
  }
  Vec3c incoming(const Vec3 &n) const
  {
    return Vec3c(c[0].incoming_amplitude(n), c[1].incoming_amplitude(n),
                 c[2].incoming_amplitude(n));
  }
  Vec3c value(const Vec3 &x) const
  {
    return Vec3c(c[0].value(x), c[1].value(x), c[2].value(x));
  }
};

VectorWaves fit_vector(const Field &f, double k, double radius, const ShellOptions &opts,
                       bool split)
{
  VectorWaves w;
  for (int a = 0; a < 3; a++)
  {
    PointSampler s = [&f, a](const Vec3 &x) { return interpolate(f, a, x); };
    w.c[a] = fit_spherical_waves(s, k, radius, opts, RadialBasis::Value, split);
  }
  return w;
}

}  // namespace

double EmMedium::k0() const
{
  return omega * std::sqrt(eps0() * mu0());
}

EmMedium uniform_em_medium(const Grid &grid, double eps0, double mu0, double omega)
{
  EmMedium m;
  m.epsilon = TensorMap(grid, isotropic(eps0));
  m.mu = TensorMap(grid, isotropic(mu0));
  m.omega = omega;
  return m;
}

Vec3c EmPlaneWave::electric(const Vec3 &x) const
{
  return e0 * std::exp(I * k0_vec.dot(x));
}

Vec3c EmPlaneWave::h0(double omega, double mu0) const
{
  return cross(k0_vec, e0) / (omega * mu0);
}

EmFields em_plane_wave_fields(const EmPlaneWave &pw, const Grid &grid, double eps0, double mu0,
                              double omega)
{
  const double k0 = omega * std::sqrt(eps0 * mu0);
  if (std::abs(pw.k0() - k0) > 1e-10 * k0)
    throw InvalidArgument("em_plane_wave_fields: |k0_vec| differs from omega sqrt(eps0 mu0)");
  if (std::abs(pw.k0_vec.cast<cplx>().dot(pw.e0)) > 1e-12 * k0 * pw.e0.norm())
    throw InvalidArgument("em_plane_wave_fields: e0 must be orthogonal to k0_vec");
  const Vec3c h0 = pw.h0(omega, mu0), ce = I * cross(pw.k0_vec, pw.e0),
              jc = -cross(pw.k0_vec, h0);
  EmFields f{Field(grid, Layout::EmBlock), Field(grid, Layout::EmBlock)};
  for (std::size_t q = 0; q < grid.node_count(); q++)
  {
    cplx ph = std::exp(I * pw.k0_vec.dot(grid.position(grid.unravel(q))));
    for (int a = 0; a < 3; a++)
    {
      f.E(q, a) = pw.e0[a] * ph;
      f.E(q, 3 + a) = ce[a] * ph;
      f.J(q, a) = jc[a] * ph;
      f.J(q, 3 + a) = -I * h0[a] * ph;
    }
  }
  return f;
}

EmSolution solve_em_scattering(const EmMedium &medium, const EmPlaneWave &pw,
                               const ScatteringOptions &opts)
{
  validate(medium, pw);
  const Grid &grid = medium.epsilon.grid();
  const double h = grid.spacing(), k0 = medium.k0(), w = medium.omega;
  EmSolution sol;
  sol.grid = grid;
  sol.omega = w;
  sol.eps0 = medium.eps0();
  sol.mu0 = medium.mu0();
  sol.k0 = k0;
  sol.incident = pw;

  double emax = sol.eps0;
  for (const Mat3c &e : medium.epsilon.values())
    emax = std::max(emax, e.operatorNorm());
  if (2 * pi / (k0 * std::sqrt(emax / sol.eps0) * h) < 10.0)
    throw ResolutionError("solve_em_scattering: fewer than 10 nodes per wavelength");

  Box box;
  if (!medium.epsilon.support(box))
  {
    sol.e_s = Field::vector(grid);
    sol.h_s = Field::vector(grid);
    sol.E_s = Field(grid, Layout::EmBlock);
    sol.J_s = Field(grid, Layout::EmBlock);
    return sol;
  }
  for (int a = 0; a < 3; a++)
    if (box.lo[a] < 2 || box.hi[a] > grid.dim(a) - 3)
      throw InvalidArgument("solve_em_scattering: inclusion must stay 2 nodes away from the grid edge");
  check_passive(medium, box);
  sol.has_support = true;
  sol.support = box;

  const Index3 ext{box.extent(0), box.extent(1), box.extent(2)};
  sol.local = Grid(ext, h, grid.position(box.lo));
  const Grid &loc = sol.local;
  const std::size_t n = loc.node_count();
  sol.chi.resize(n);
  for (std::size_t q = 0; q < n; q++)
  {
    Index3 l = loc.unravel(q);
    std::size_t gq = grid.index(l[0] + box.lo[0], l[1] + box.lo[1], l[2] + box.lo[2]);
    sol.chi[q] = medium.epsilon[gq] / sol.eps0 - Mat3c::Identity();
  }

  const Helmholtz H{k0, h};
  Convolver conv(ext, ext, Index3{0, 0, 0});
  add_kernels(conv, H, false);

  std::vector<cplx> pol[3], out[3];
  for (auto &p : pol)
    p.resize(n);
  auto polarize = [&](const Eigen::VectorXcd &x) {
    for (std::size_t q = 0; q < n; q++)
    {
      Vec3c p = sol.chi[q] * Vec3c(x[q], x[n + q], x[2 * n + q]);
      for (int a = 0; a < 3; a++)
        pol[a][q] = p[a];
    }
  };
  LinearOperator A = [&](const Eigen::VectorXcd &x, Eigen::VectorXcd &y) {
    polarize(x);
    radiate(conv, k0, pol, out, nullptr);
    y = x;
    for (int a = 0; a < 3; a++)
      for (std::size_t q = 0; q < n; q++)
        y[a * n + q] -= out[a][q];
  };

  Eigen::VectorXcd b(3 * n);
  for (std::size_t q = 0; q < n; q++)
  {
    Vec3c e = pw.electric(loc.position(loc.unravel(q)));
    for (int a = 0; a < 3; a++)
      b[a * n + q] = e[a];
  }
  Eigen::VectorXcd x = b;
  KrylovOptions ko;
  ko.tol = opts.tol;
  ko.max_iter = opts.max_iter;
  ko.restart = opts.restart;
  ko.label = "solve_em_scattering";
  KrylovResult kr;
  try
  {
    kr = opts.method == SolverMethod::Born ? richardson(A, b, x, ko) : gmres(A, b, x, ko);
  }
  catch (const NonConvergence &e)
  {
    double cmax = 0.0;
    for (const Mat3c &c : sol.chi)
      cmax = std::max(cmax, c.operatorNorm());
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s (max contrast %.3g, k0 * support size %.3g)", e.what(),
                  cmax, k0 * h * std::max({ext[0], ext[1], ext[2]}));
    throw NonConvergence(buf, e.iterations, e.residual, e.contraction);
  }
  sol.iterations = kr.iterations;
  sol.residual = kr.residual;
  sol.contraction = kr.contraction();

  sol.e_local = Field::vector(loc);
  for (std::size_t q = 0; q < n; q++)
    for (int a = 0; a < 3; a++)
      sol.e_local(q, a) = x[a * n + q];
  if (!opts.full_fields)
    return sol;

  polarize(x);
  Convolver big(ext, grid.dims(), Index3{-box.lo[0], -box.lo[1], -box.lo[2]});
  add_kernels(big, H, true);
  std::vector<cplx> curl_e[3];
  radiate(big, k0, pol, out, curl_e);
  const std::size_t N = grid.node_count();
  sol.e_s = Field::vector(grid);
  sol.h_s = Field::vector(grid);
  sol.E_s = Field(grid, Layout::EmBlock);
  sol.J_s = Field(grid, Layout::EmBlock);
  const cplx to_h = -I / (w * sol.mu0);
  for (std::size_t q = 0; q < N; q++)
  {
    Vec3c es(out[0][q], out[1][q], out[2][q]), ce(curl_e[0][q], curl_e[1][q], curl_e[2][q]);
    Vec3c js = w * sol.eps0 * es;
    if (!medium.epsilon.is_background(q))
    {
      Vec3c e = pw.electric(grid.position(grid.unravel(q))) + es;
      js = w * medium.epsilon[q] * e - w * sol.eps0 * (e - es);
    }
    for (int a = 0; a < 3; a++)
    {
      sol.e_s(q, a) = es[a];
      sol.h_s(q, a) = to_h * ce[a];
      sol.E_s(q, a) = es[a];
      sol.E_s(q, 3 + a) = ce[a];
      sol.J_s(q, a) = js[a];
      sol.J_s(q, 3 + a) = -I * to_h * ce[a];
    }
  }
  return sol;
}

double EmFarField::power_integral() const
{
  double s = 0.0;
  for (std::size_t i = 0; i < weights.size(); i++)
    s += weights[i] * e_inf[i].squaredNorm();
  return s;
}

double EmFarField::max_abs() const
{
  double m = 0.0;
  for (const Vec3c &e : e_inf)
    m = std::max(m, e.norm());
  return m;
}

EmFarField em_farfield_direct(const EmSolution &sol, double radius,
                              const std::vector<Vec3> &directions, const ShellOptions &opts)
{
  if (sol.e_s.size() == 0)
    throw InvalidArgument("em_farfield_direct: solution has no grid fields");
  require_shell(sol, radius, opts, "em_farfield_direct");
  VectorWaves vw = fit_vector(sol.e_s, sol.k0, radius, opts, false);
  EmFarField f;
  f.k0 = sol.k0;
  f.omega = sol.omega;
  f.mu0 = sol.mu0;
  f.radius = radius;
  f.directions = directions;
  double rmax = 0.0;
  for (const Vec3 &n : directions)
  {
    Vec3c e = vw.outgoing(n);
    f.e_inf.push_back(e);
    f.h_inf.push_back(sol.k0 * cross(n, e) / (sol.omega * sol.mu0));
    f.radial.push_back(std::abs(n.cast<cplx>().dot(e)));
    rmax = std::max(rmax, f.radial.back());
  }
  const double emax = f.max_abs();
  f.transversality = emax > 0.0 ? rmax / emax : 0.0;
  for (int a = 0; a < 3; a++)
    f.waves[a] = vw.c[a];
  return f;
}

EmFarField em_farfield_direct(const EmSolution &sol, double radius, const ShellOptions &opts)
{
  const std::vector<double> radii = shell_radii(radius, opts.shell_fraction, opts.radii);
  SphereQuadrature rule = shell_quadrature(sol.k0, radii.back(), opts);
  EmFarField f = em_farfield_direct(sol, radius, rule.directions, opts);
  f.weights = rule.weights;
  return f;
}

double em_scattered_power(const EmFarField &far)
{
  return far.k0 / (2 * far.omega * far.mu0) * far.power_integral();
}

double em_absorbed_power(const EmSolution &sol)
{
  if (sol.e_local.size() == 0)
    return 0.0;
  double s = 0.0;
  for (std::size_t q = 0; q < sol.local.node_count(); q++)
  {
    Vec3c e(sol.e_local(q, 0), sol.e_local(q, 1), sol.e_local(q, 2));
    s += (e.adjoint() * imag_part(sol.chi[q]) * e)(0, 0).real();
  }
  return 0.5 * sol.omega * sol.eps0 * s * std::pow(sol.local.spacing(), 3);
}

double em_shell_flux(const EmSolution &sol, double radius, const ShellOptions &opts)
{
  if (sol.e_s.size() == 0)
    throw InvalidArgument("em_shell_flux: solution has no grid fields");
  require_shell(sol, radius, opts, "em_shell_flux");
  Field poynting = Field::vector(sol.grid);
  for (std::size_t q = 0; q < sol.grid.node_count(); q++)
  {
    Vec3c e(sol.e_s(q, 0), sol.e_s(q, 1), sol.e_s(q, 2));
    Vec3c h(sol.h_s(q, 0), sol.h_s(q, 1), sol.h_s(q, 2));
    Vec3c s = atc::cross(e, Vec3c(h.conjugate()));
    for (int a = 0; a < 3; a++)
      poynting(q, a) = s[a];
  }
  SurfaceOptions so;
  so.shell_fraction = opts.shell_fraction;
  so.shell_radii = opts.radii;
  so.k0 = sol.k0;
  return 0.5 * surface_integral(poynting, Ball{opts.center, radius}, so).real();
}

cplx em_farfield_via_identity(const EmSolution &sol, const Vec3 &direction, const Vec3c &probe)
{
  if (!sol.has_support)
  {
    em_farfield_via_identity(sol, direction, probe, Box{});
    return 0.0;
  }
  return em_farfield_via_identity(sol, direction, probe, sol.support);
}

cplx em_farfield_via_identity(const EmSolution &sol, const Vec3 &direction, const Vec3c &probe,
                              const Box &region)
{
  if (std::abs(direction.norm() - 1.0) > 1e-12)
    throw InvalidArgument("em_farfield_via_identity: probe direction must be a unit vector");
  if (std::abs(direction.cast<cplx>().dot(probe)) > 1e-12 * probe.norm())
    throw InvalidArgument("em_farfield_via_identity: probe polarization must be transverse");
  if (!sol.has_support)
    return 0.0;
  if (sol.E_s.size() == 0)
    throw InvalidArgument("em_farfield_via_identity: solution has no grid fields");
  const Grid &g = sol.grid;
  for (int a = 0; a < 3; a++)
    if (region.lo[a] < 0 || region.hi[a] >= g.dim(a))
      throw InvalidArgument("em_farfield_via_identity: region outside the grid");
  const double w = sol.omega, k0 = sol.k0;
  const Vec3 kv = k0 * direction;
  const Vec3c ce = I * cross(kv, probe);
  cplx I1 = 0.0;
  for (int k = region.lo[2]; k <= region.hi[2]; k++)
    for (int j = region.lo[1]; j <= region.hi[1]; j++)
      for (int i = region.lo[0]; i <= region.hi[0]; i++)
      {
        std::size_t q = g.index(i, j, k);
        cplx ph = std::exp(-I * kv.dot(g.position(i, j, k)));
        for (int a = 0; a < 3; a++)
        {
          I1 += (sol.J_s(q, a) - w * sol.eps0 * sol.E_s(q, a)) * std::conj(probe[a]) * ph;
          I1 += (sol.J_s(q, 3 + a) + sol.E_s(q, 3 + a) / (w * sol.mu0)) * std::conj(ce[a]) * ph;
        }
      }
  I1 *= std::pow(g.spacing(), 3);
  return w * sol.mu0 * I1 / (4 * pi);
}

Vec3c em_farfield_vector_via_identity(const EmSolution &sol, const Vec3 &direction)
{
  const Vec3 t = theta_hat(direction), p = phi_hat(direction);
  return em_farfield_via_identity(sol, direction, t.cast<cplx>()) * t.cast<cplx>() +
         em_farfield_via_identity(sol, direction, p.cast<cplx>()) * p.cast<cplx>();
}

EmAuxiliaryCheck em_auxiliary_orthogonality(const EmSolution &sol, double radius,
                                            const ShellOptions &opts)
{
  if (sol.e_s.size() == 0)
    throw InvalidArgument("em_auxiliary_orthogonality: solution has no grid fields");
  require_shell(sol, radius, opts, "em_auxiliary_orthogonality");
  const double k = sol.k0, w = sol.omega;
  const Grid &g = sol.grid;
  const std::vector<double> radii = shell_radii(radius, opts.shell_fraction, opts.radii);
  const SphereQuadrature rule = shell_quadrature(k, radii.back(), opts);
  const VectorWaves we = fit_vector(sol.e_s, k, radius, opts, true);
  const VectorWaves wh = fit_vector(sol.h_s, k, radius, opts, true);
  const double zh = k / (w * sol.mu0), ze = k / (w * sol.eps0);

  EmAuxiliaryCheck out;
  double nEs = 0, nEi = 0, nHs = 0, nHi = 0, nrel = 0, ndual = 0, rmax = 0, emax = 0;
  cplx aux = 0.0, S_inf = 0.0;
  for (std::size_t p = 0; p < rule.size(); p++)
  {
    const Vec3 &n = rule.directions[p];
    const Vec3c nc = n.cast<cplx>();
    const double wt = rule.weights[p];
    const Vec3c es = we.outgoing(n), ei = we.incoming(n);
    const Vec3c hs = wh.outgoing(n), hi = wh.incoming(n);
    // auxiliary magnetic amplitudes from the electric ones
    const Vec3c hs_a = zh * cross(n, es), hi_a = -zh * cross(n, ei);
    aux += wt * (nc.dot(atc::cross(hs_a, es.conjugate())) + nc.dot(atc::cross(hi_a, ei.conjugate())));
    S_inf += wt * (nc.dot(atc::cross(hs, es.conjugate())) + nc.dot(atc::cross(hi, ei.conjugate())));
    out.scale += wt * es.norm() * hs.norm();
    nEs += wt * es.squaredNorm();
    nEi += wt * ei.squaredNorm();
    nHs += wt * hs.squaredNorm();
    nHi += wt * hi.squaredNorm();
    nrel += wt * (hs - hs_a).squaredNorm();
    ndual += wt * (es + ze * cross(n, hs)).squaredNorm();
    rmax = std::max(rmax, std::abs(nc.dot(es)));
    emax = std::max(emax, es.norm());
  }
  // Eigen's dot conjugates its left argument; n is real so nc.dot(v) = n·v
  out.auxiliary_term = -I * aux;
  out.limit_term = I * S_inf;
  out.incoming_ratio = nEs > 0 ? std::sqrt(nEi / nEs) : 0.0;
  out.incoming_ratio_h = nHs > 0 ? std::sqrt(nHi / nHs) : 0.0;
  out.relation_error = nHs > 0 ? std::sqrt(nrel / nHs) : 0.0;
  out.dual_relation_error = nEs > 0 ? std::sqrt(ndual / nEs) : 0.0;
  out.transversality = emax > 0 ? rmax / emax : 0.0;

  // S(r) = i r² ∫ n·(h×ē) from the fitted expansions
  auto S_fit = [&](double r) {
    cplx s = 0.0;
    for (std::size_t p = 0; p < rule.size(); p++)
    {
      const Vec3 &n = rule.directions[p];
      Vec3c e = we.value(r * n), h = wh.value(r * n);
      s += rule.weights[p] * n.cast<cplx>().dot(atc::cross(h, e.conjugate()));
    }
    return I * r * r * s;
  };

  cplx ball = 0.0, surf = 0.0, tail = 0.0;
  for (double r : radii)
  {
    std::vector<double> bw = ball_weights(g, Ball{opts.center, r});
    cplx v = 0.0;
    for (std::size_t q = 0; q < g.node_count(); q++)
      if (bw[q] > 0)
        for (int a = 0; a < 6; a++)
          v += bw[q] * sol.J_s(q, a) * std::conj(sol.E_s(q, a));
    ball += v;
    cplx s = 0.0;
    for (std::size_t p = 0; p < rule.size(); p++)
    {
      const Vec3 &n = rule.directions[p];
      Vec3 x = opts.center + r * n;
      Vec3c e, h;
      for (int a = 0; a < 3; a++)
      {
        e[a] = interpolate(sol.e_s, a, x);
        h[a] = interpolate(sol.h_s, a, x);
      }
      s += rule.weights[p] * n.cast<cplx>().dot(atc::cross(h, e.conjugate()));
    }
    surf += I * r * r * s;
    tail += out.limit_term - S_fit(r);
  }
  const double nr = double(radii.size());
  out.ball_integral = ball / nr;
  out.surface_term = surf / nr;
  tail /= nr;
  cplx total = out.ball_integral + tail + out.auxiliary_term;
  if (out.scale > 0)
  {
    out.defect = std::abs(total) / out.scale;
    out.key_identity = std::abs(out.ball_integral - out.surface_term) / out.scale;
  }
  return out;
}

void export_em_pattern(const EmFarField &far, const std::string &csv_path,
                       const std::string &json_path, const nlohmann::json &extra)
{
  std::string csv = "theta,phi,re_e_theta,im_e_theta,re_e_phi,im_e_phi\n";
  char buf[192];
  for (std::size_t i = 0; i < far.directions.size(); i++)
  {
    const Vec3 &n = far.directions[i];
    cplx et = theta_hat(n).cast<cplx>().dot(far.e_inf[i]);
    cplx ep = phi_hat(n).cast<cplx>().dot(far.e_inf[i]);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", polar_angle(n),
                  azimuth(n), et.real(), et.imag(), ep.real(), ep.imag());
    csv += buf;
  }
  write_file_atomic(csv_path, csv);
  nlohmann::json j = extra;
  j["k0"] = far.k0;
  j["radius"] = far.radius;
  j["method"] = "spherical-wave";
  j["basis"] = "spherical (theta_hat, phi_hat)";
  j["directions"] = far.directions.size();
  j["transversality"] = far.transversality;
  write_file_atomic(json_path, dump_json(j));
}

nlohmann::json to_json(const EmAuxiliaryCheck &a)
{
  return {{"defect", a.defect},
          {"key_identity", a.key_identity},
          {"incoming_ratio", a.incoming_ratio},
          {"incoming_ratio_h", a.incoming_ratio_h},
          {"relation_error", a.relation_error},
          {"dual_relation_error", a.dual_relation_error},
          {"transversality", a.transversality},
          {"scale", a.scale},
          {"ball_integral", to_json(a.ball_integral)},
          {"surface_term", to_json(a.surface_term)},
          {"limit_term", to_json(a.limit_term)},
          {"auxiliary_term", to_json(a.auxiliary_term)}};
}

}  // namespace atc
