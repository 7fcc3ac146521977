#include "atc/acoustic.hpp"

#include <cmath>
#include <numbers>
#include "atc/calculus.hpp"
#include "atc/errors.hpp"
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

void validate(const AcousticMedium &m, const PlaneWave &pw)
{
  const Grid &g = m.kappa.grid();
  if (g.planar())
    throw InvalidArgument("solve_scattering: three-dimensional grid required");
  if (m.rho.grid() != g)
    throw InvalidArgument("solve_scattering: density and bulk modulus live on different grids");
  const Mat3c &r0 = m.rho.background();
  const double rho0 = r0(0, 0).real();
  if (!(rho0 > 0.0) || (r0 - isotropic(rho0)).norm() > 1e-14 * rho0)
    throw InvalidArgument("solve_scattering: background density must be rho0 I with rho0 > 0");
  const cplx k0c = m.kappa.background();
  if (!(k0c.real() > 0.0) || k0c.imag() != 0.0)
    throw InvalidArgument("solve_scattering: background bulk modulus must be real and positive");
  if (!(m.omega > 0.0))
    throw InvalidArgument("solve_scattering: omega must be positive");
  const double k0 = m.k0();
  if (std::abs(pw.k0 - k0) > 1e-10 * k0)
    throw InvalidArgument("solve_scattering: plane-wave k0 differs from omega sqrt(rho0/kappa0)");
  if (std::abs(pw.direction.norm() - 1.0) > 1e-12)
    throw InvalidArgument("solve_scattering: plane-wave direction must be a unit vector");
}

// Largest local wavenumber, for the resolution check.
double max_wavenumber(const AcousticMedium &m, const Box &box)
{
  const Grid &g = m.kappa.grid();
  double kmax = m.k0();
  for (int k = box.lo[2]; k <= box.hi[2]; k++)
    for (int j = box.lo[1]; j <= box.hi[1]; j++)
      for (int i = box.lo[0]; i <= box.hi[0]; i++)
      {
        std::size_t q = g.index(i, j, k);
        double r = m.rho[q].operatorNorm();
        kmax = std::max(kmax, m.omega * std::sqrt(r / std::abs(m.kappa[q])));
      }
  return kmax;
}

void check_passive(const AcousticMedium &m, const Box &box)
{
  const Grid &g = m.kappa.grid();
  for (int k = box.lo[2]; k <= box.hi[2]; k++)
    for (int j = box.lo[1]; j <= box.hi[1]; j++)
      for (int i = box.lo[0]; i <= box.hi[0]; i++)
      {
        std::size_t q = g.index(i, j, k);
        cplx kap = m.kappa[q];
        if (kap.imag() > 1e-14 * std::abs(kap))
          throw InvalidArgument("solve_scattering: active bulk modulus (Im kappa > 0)");
        Eigen::SelfAdjointEigenSolver<Mat3c> es(imag_part(m.rho[q]), Eigen::EigenvaluesOnly);
        if (es.eigenvalues()(0) < -1e-14 * m.rho[q].norm())
          throw InvalidArgument("solve_scattering: active density (Im rho not PSD)");
      }
}

Eigen::Vector4cd incident_block(const PlaneWave &pw, const Vec3 &x)
{
  cplx p = pw.pressure(x);
  Eigen::Vector4cd e;
  for (int a = 0; a < 3; a++)
    e[a] = I * pw.k0 * pw.direction[a] * p;
  e[3] = p;
  return e;
}

int hess_id(int a, int b)
{
  static const int table[3][3] = {{4, 5, 6}, {5, 7, 8}, {6, 8, 9}};
  return table[a][b];
}

// Kernels h³g (id 0), h³∂_a g (1..3), h³∂_a∂_b g (4..9, when `hessian`).
void add_kernels(Convolver &conv, const Helmholtz &H, bool hessian)
{
  const double vol = H.h * H.h * H.h;
  conv.add_kernel([&](const Index3 &d) { return vol * H.g(d); });
  for (int a = 0; a < 3; a++)
    conv.add_kernel([&, a](const Index3 &d) { return vol * H.grad(d, a); });
  if (!hessian)
    return;
  for (int a = 0; a < 3; a++)
    for (int b = a; b < 3; b++)
      conv.add_kernel([&, a, b](const Index3 &d) { return vol * H.hessian(d, a, b); });
}

// Scattered (P, F) on the convolver target from polarizations Π_P (and Π_F).
//   P^s = k0² g*Π_P + Σ_b ∂_b g*Π_F,b
//   F^s_a = k0² ∂_a g*Π_P + Σ_b ∂_a∂_b g*Π_F,b
void scatter(Convolver &conv, double k0, const std::vector<cplx> &piP,
             const std::vector<std::vector<cplx>> *piF, std::vector<cplx> out[4], bool want_f)
{
  std::vector<cplx> sP, sF[3], acc;
  conv.forward(piP.data(), sP);
  if (piF)
    for (int b = 0; b < 3; b++)
      conv.forward((*piF)[b].data(), sF[b]);
  const std::size_t nt = conv.target_size();
  acc.assign(conv.spectrum_size(), 0.0);
  conv.accumulate(0, sP, acc, k0 * k0);
  if (piF)
    for (int b = 0; b < 3; b++)
      conv.accumulate(1 + b, sF[b], acc);
  out[3].resize(nt);
  conv.backward(acc, out[3].data());
  if (!want_f)
    return;
  for (int a = 0; a < 3; a++)
  {
    acc.assign(conv.spectrum_size(), 0.0);
    conv.accumulate(1 + a, sP, acc, k0 * k0);
    if (piF)
      for (int b = 0; b < 3; b++)
        conv.accumulate(hess_id(a, b), sF[b], acc);
    out[a].resize(nt);
    conv.backward(acc, out[a].data());
  }
}

}  // namespace

double AcousticMedium::k0() const
{
  return omega * std::sqrt(rho0() / kappa0());
}

AcousticMedium uniform_medium(const Grid &grid, double rho0, double kappa0, double omega)
{
  AcousticMedium m;
  m.rho = TensorMap(grid, isotropic(rho0));
  m.kappa = ScalarMap(grid, kappa0);
  m.omega = omega;
  return m;
}

cplx PlaneWave::pressure(const Vec3 &x) const
{
  return amplitude * std::exp(I * (k0 * direction.dot(x)));
}

AcousticFields plane_wave_fields(const PlaneWave &pw, const Grid &grid, double rho0,
                                 double kappa0, double omega)
{
  const double k0 = omega * std::sqrt(rho0 / kappa0);
  if (std::abs(pw.k0 - k0) > 1e-10 * k0)
    throw InvalidArgument("plane_wave_fields: k0 differs from omega sqrt(rho0/kappa0)");
  if (std::abs(pw.direction.norm() - 1.0) > 1e-12)
    throw InvalidArgument("plane_wave_fields: direction must be a unit vector");
  AcousticFields f{Field(grid, Layout::AcousticBlock), Field(grid, Layout::AcousticBlock)};
  for (std::size_t q = 0; q < grid.node_count(); q++)
  {
    Eigen::Vector4cd e = incident_block(pw, grid.position(grid.unravel(q)));
    for (int a = 0; a < 3; a++)
    {
      f.E(q, a) = e[a];
      f.J(q, a) = -e[a] / (omega * rho0);
    }
    f.E(q, 3) = e[3];
    f.J(q, 3) = omega / kappa0 * e[3];
  }
  return f;
}

AcousticSolution solve_scattering(const AcousticMedium &medium, const PlaneWave &pw,
                                  const ScatteringOptions &opts)
{
  validate(medium, pw);
  const Grid &grid = medium.kappa.grid();
  const double h = grid.spacing(), k0 = medium.k0();
  AcousticSolution sol;
  sol.grid = grid;
  sol.omega = medium.omega;
  sol.rho0 = medium.rho0();
  sol.kappa0 = medium.kappa0();
  sol.k0 = k0;
  sol.incident = pw;

  if (2 * pi / (max_wavenumber(medium, whole_grid(grid)) * h) < 8.0)
    throw ResolutionError("solve_scattering: fewer than 8 nodes per wavelength");

  Box sk, sr, box;
  const bool has_k = medium.kappa.support(sk), has_r = medium.rho.support(sr);
  if (!has_k && !has_r)
  {
    sol.P_s = Field::scalar(grid);
    sol.v_s = Field::vector(grid);
    sol.E_s = Field(grid, Layout::AcousticBlock);
    sol.J_s = Field(grid, Layout::AcousticBlock);
    return sol;
  }
  box = has_k ? sk : sr;
  if (has_k && has_r)
    for (int a = 0; a < 3; a++)
    {
      box.lo[a] = std::min(sk.lo[a], sr.lo[a]);
      box.hi[a] = std::max(sk.hi[a], sr.hi[a]);
    }
  for (int a = 0; a < 3; a++)
    if (box.lo[a] < 2 || box.hi[a] > grid.dim(a) - 3)
      throw InvalidArgument("solve_scattering: inclusion must stay 2 nodes away from the grid edge");
  check_passive(medium, box);
  sol.has_support = true;
  sol.support = box;
  sol.density_contrast = has_r;

  const Index3 ext{box.extent(0), box.extent(1), box.extent(2)};
  sol.local = Grid(ext, h, grid.position(box.lo));
  const Grid &loc = sol.local;
  const std::size_t n = loc.node_count();
  sol.dkappa.resize(n);
  sol.drho.resize(n);
  for (std::size_t q = 0; q < n; q++)
  {
    Index3 l = loc.unravel(q);
    std::size_t gq = grid.index(l[0] + box.lo[0], l[1] + box.lo[1], l[2] + box.lo[2]);
    sol.dkappa[q] = sol.kappa0 / medium.kappa[gq] - 1.0;
    sol.drho[q] = sol.rho0 * medium.rho[gq].inverse() - Mat3c::Identity();
  }

  const Helmholtz H{k0, h};
  Convolver conv(ext, ext, Index3{0, 0, 0});
  add_kernels(conv, H, has_r);

  const int nb = has_r ? 4 : 1;
  std::vector<cplx> piP(n);
  std::vector<std::vector<cplx>> piF(3, std::vector<cplx>(n));
  std::vector<cplx> out[4];
  // unknown layout: P, then F_x, F_y, F_z when the density varies
  auto polarize = [&](const Eigen::VectorXcd &x) {
    for (std::size_t q = 0; q < n; q++)
    {
      piP[q] = sol.dkappa[q] * x[q];
      if (has_r)
      {
        Vec3c F(x[n + q], x[2 * n + q], x[3 * n + q]);
        Vec3c pf = sol.drho[q] * F;
        for (int b = 0; b < 3; b++)
          piF[b][q] = pf[b];
      }
    }
  };
  LinearOperator A = [&](const Eigen::VectorXcd &x, Eigen::VectorXcd &y) {
    polarize(x);
    scatter(conv, k0, piP, has_r ? &piF : nullptr, out, has_r);
    y = x;
    for (std::size_t q = 0; q < n; q++)
      y[q] -= out[3][q];
    if (has_r)
      for (int a = 0; a < 3; a++)
        for (std::size_t q = 0; q < n; q++)
          y[(1 + a) * n + q] -= out[a][q];
  };

  Eigen::VectorXcd b(nb * n);
  for (std::size_t q = 0; q < n; q++)
  {
    Eigen::Vector4cd e = incident_block(pw, loc.position(loc.unravel(q)));
    b[q] = e[3];
    if (has_r)
      for (int a = 0; a < 3; a++)
        b[(1 + a) * n + q] = e[a];
  }
  Eigen::VectorXcd x = b;
  KrylovOptions ko;
  ko.tol = opts.tol;
  ko.max_iter = opts.max_iter;
  ko.restart = opts.restart;
  ko.label = "solve_scattering";
  KrylovResult kr;
  try
  {
    kr = opts.method == SolverMethod::Born ? richardson(A, b, x, ko) : gmres(A, b, x, ko);
  }
  catch (const NonConvergence &e)
  {
    double cmax = 0.0;
    for (std::size_t q = 0; q < n; q++)
      cmax = std::max({cmax, std::abs(sol.dkappa[q]), sol.drho[q].norm()});
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s (max contrast %.3g, k0 * support size %.3g)", e.what(),
                  cmax, k0 * h * std::max({ext[0], ext[1], ext[2]}));
    throw NonConvergence(buf, e.iterations, e.residual, e.contraction);
  }
  sol.iterations = kr.iterations;
  sol.residual = kr.residual;
  sol.contraction = kr.contraction();

  // total (F, P) on the support
  polarize(x);
  scatter(conv, k0, piP, has_r ? &piF : nullptr, out, true);
  sol.E_local = Field(loc, Layout::AcousticBlock);
  for (std::size_t q = 0; q < n; q++)
  {
    Eigen::Vector4cd e = incident_block(pw, loc.position(loc.unravel(q)));
    sol.E_local(q, 3) = x[q];
    for (int a = 0; a < 3; a++)
      sol.E_local(q, a) = has_r ? x[(1 + a) * n + q] : e[a] + out[a][q];
  }

  if (!opts.full_fields)
    return sol;

  Convolver big(ext, grid.dims(), Index3{-box.lo[0], -box.lo[1], -box.lo[2]});
  add_kernels(big, H, has_r);
  scatter(big, k0, piP, has_r ? &piF : nullptr, out, true);
  const std::size_t N = grid.node_count();
  sol.P_s = Field::scalar(grid);
  sol.v_s = Field::vector(grid);
  sol.E_s = Field(grid, Layout::AcousticBlock);
  sol.J_s = Field(grid, Layout::AcousticBlock);
  const double w = medium.omega;
  for (std::size_t q = 0; q < N; q++)
  {
    Eigen::Vector4cd ea = incident_block(pw, grid.position(grid.unravel(q)));
    Eigen::Vector4cd es(out[0][q], out[1][q], out[2][q], out[3][q]);
    for (int a = 0; a < 4; a++)
      sol.E_s(q, a) = es[a];
    sol.P_s(q, 0) = es[3];
    Eigen::Vector4cd js;
    if (medium.kappa.is_background(q) && medium.rho.is_background(q))
    {
      js.head<3>() = -es.head<3>() / (w * sol.rho0);
      js[3] = w / sol.kappa0 * es[3];
    }
    else
    {
      Eigen::Vector4cd e = ea + es;
      Vec3c f = e.head<3>();
      js.head<3>() = -medium.rho[q].inverse() * f / w + ea.head<3>() / (w * sol.rho0);
      js[3] = w / medium.kappa[q] * e[3] - w / sol.kappa0 * ea[3];
    }
    for (int a = 0; a < 4; a++)
      sol.J_s(q, a) = js[a];
    for (int a = 0; a < 3; a++)
      sol.v_s(q, a) = I * js[a];
  }
  return sol;
}

FarFieldPattern farfield_direct(const AcousticSolution &sol, double radius,
                                const std::vector<Vec3> &directions, const ShellOptions &opts,
                                FarFieldMethod method)
{
  if (sol.P_s.size() == 0)
    throw InvalidArgument("farfield_direct: solution has no grid fields");
  const Field &P = sol.P_s;
  PointSampler sample = [&](const Vec3 &x) { return interpolate(P, 0, x); };
  // the shell must clear the inclusion and stay inside the grid
  const std::vector<double> radii = shell_radii(radius, opts.shell_fraction, opts.radii);
  require_strictly_interior(sol.grid, Ball{opts.center, radii.back()}, 1.0, "farfield_direct");
  if (sol.has_support)
  {
    const double h = sol.grid.spacing();
    double reach = 0.0;
    for (std::size_t q = 0; q < sol.local.node_count(); q++)
      if (sol.dkappa[q] != 0.0 || sol.drho[q] != Mat3c::Zero())
        reach = std::max(reach, (sol.local.position(sol.local.unravel(q)) - opts.center).norm());
    if (radii.front() < reach + h)
      throw InvalidArgument("farfield_direct: shell reaches into the inclusion");
  }
  if (method == FarFieldMethod::Asymptotic)
  {
    FarFieldPattern p;
    p.directions = directions;
    p.k0 = sol.k0;
    p.radius = radius;
    p.method = method;
    p.amplitudes = asymptotic_amplitudes(sample, sol.k0, radius, opts, directions);
    return p;
  }
  SphericalWaves w = fit_spherical_waves(sample, sol.k0, radius, opts, RadialBasis::Value, false);
  return make_pattern(w, directions, radius);
}

FarFieldPattern farfield_direct(const AcousticSolution &sol, double radius,
                                const ShellOptions &opts)
{
  const std::vector<double> radii = shell_radii(radius, opts.shell_fraction, opts.radii);
  SphereQuadrature rule = shell_quadrature(sol.k0, radii.back(), opts);
  FarFieldPattern p = farfield_direct(sol, radius, rule.directions, opts);
  p.weights = rule.weights;
  return p;
}

cplx farfield_via_identity(const AcousticSolution &sol, const Vec3 &direction)
{
  if (!sol.has_support)
    return 0.0;
  return farfield_via_identity(sol, direction, sol.support);
}

cplx farfield_via_identity(const AcousticSolution &sol, const Vec3 &direction, const Box &region)
{
  if (std::abs(direction.norm() - 1.0) > 1e-12)
    throw InvalidArgument("farfield_via_identity: probe direction must be a unit vector");
  if (sol.E_s.size() == 0)
  {
    if (!sol.has_support)
      return 0.0;
    throw InvalidArgument("farfield_via_identity: solution has no grid fields");
  }
  const Grid &g = sol.grid;
  for (int a = 0; a < 3; a++)
    if (region.lo[a] < 0 || region.hi[a] >= g.dim(a))
      throw InvalidArgument("farfield_via_identity: region outside the grid");
  PlaneWave probe{1.0, direction, sol.k0};
  const double w = sol.omega;
  cplx I1 = 0.0;
  for (int k = region.lo[2]; k <= region.hi[2]; k++)
    for (int j = region.lo[1]; j <= region.hi[1]; j++)
      for (int i = region.lo[0]; i <= region.hi[0]; i++)
      {
        std::size_t q = g.index(i, j, k);
        Eigen::Vector4cd ea = incident_block(probe, g.position(i, j, k));
        for (int a = 0; a < 3; a++)
          I1 += (sol.J_s(q, a) + sol.E_s(q, a) / (w * sol.rho0)) * std::conj(ea[a]);
        I1 += (sol.J_s(q, 3) - w / sol.kappa0 * sol.E_s(q, 3)) * std::conj(ea[3]);
      }
  I1 *= std::pow(g.spacing(), 3);
  return w * sol.rho0 * I1 / (4 * pi);
}

double absorbed_power(const AcousticSolution &sol)
{
  if (sol.E_local.size() == 0)
    return 0.0;
  const Grid &loc = sol.local;
  const double w = sol.omega;
  double s = 0.0;
  for (std::size_t q = 0; q < loc.node_count(); q++)
  {
    Vec3c F(sol.E_local(q, 0), sol.E_local(q, 1), sol.E_local(q, 2));
    cplx P = sol.E_local(q, 3);
    Mat3c rinv = (Mat3c::Identity() + sol.drho[q]) / sol.rho0;
    Vec3c v = -I * rinv * F / w;
    Mat3c rho = rinv.inverse();
    s += (v.adjoint() * imag_part(rho) * v)(0, 0).real();
    s += std::norm(P) * (sol.dkappa[q].imag() / sol.kappa0);
  }
  return 0.5 * w * s * std::pow(loc.spacing(), 3);
}

double scattered_power(const FarFieldPattern &pattern, double omega, double rho0)
{
  return pattern.k0 / (2 * omega * rho0) * pattern.power_integral();
}

OpticalTheorem optical_theorem_check(const FarFieldPattern &pattern, const AcousticSolution &sol)
{
  if (pattern.waves.outgoing.empty())
    throw InvalidArgument("optical_theorem_check: pattern needs the spherical-wave expansion");
  OpticalTheorem o;
  o.scattered = scattered_power(pattern, sol.omega, sol.rho0);
  o.absorbed = absorbed_power(sol);
  o.extinction_rhs = o.scattered + o.absorbed;
  const Vec3 &d = sol.incident.direction;
  const cplx pbar = std::conj(sol.incident.amplitude);
  const double c = 2 * pi / (sol.omega * sol.rho0);
  o.extinction_lhs = c * (pbar * pattern.waves.outgoing_amplitude(d)).imag();
  o.extinction_backward = c * (pbar * pattern.waves.outgoing_amplitude(-d)).imag();
  auto rel = [&](double lhs) {
    double den = std::abs(o.extinction_rhs);
    return den > 0.0 ? std::abs(lhs - o.extinction_rhs) / den : std::abs(lhs);
  };
  o.mismatch = rel(o.extinction_lhs);
  o.mismatch_backward = rel(o.extinction_backward);
  return o;
}

std::vector<double> ball_weights(const Grid &grid, const Ball &ball, int subsamples)
{
  const double h = grid.spacing(), vol = std::pow(h, 3), half = 0.5 * std::sqrt(3.0) * h;
  std::vector<double> w(grid.node_count(), 0.0);
  for (std::size_t q = 0; q < grid.node_count(); q++)
  {
    Vec3 x = grid.position(grid.unravel(q));
    double r = (x - ball.center).norm();
    if (r <= ball.radius - half)
      w[q] = vol;
    else if (r < ball.radius + half)
    {
      int inside = 0;
      for (int c = 0; c < subsamples; c++)
        for (int b = 0; b < subsamples; b++)
          for (int a = 0; a < subsamples; a++)
          {
            Vec3 y = x + h * (Vec3(a, b, c) + Vec3::Constant(0.5)) / subsamples -
                     Vec3::Constant(0.5 * h);
            inside += (y - ball.center).norm() < ball.radius;
          }
      w[q] = vol * inside / std::pow(subsamples, 3);
    }
  }
  return w;
}

AuxiliaryCheck auxiliary_orthogonality_check(const AcousticSolution &sol, double radius,
                                             const ShellOptions &opts)
{
  if (sol.P_s.size() == 0)
    throw InvalidArgument("auxiliary_orthogonality_check: solution has no grid fields");
  const double k = sol.k0, w = sol.omega;
  const Grid &g = sol.grid;
  const std::vector<double> radii = shell_radii(radius, opts.shell_fraction, opts.radii);
  require_strictly_interior(g, Ball{opts.center, radii.back()}, 1.0,
                            "auxiliary_orthogonality_check");
  const SphereQuadrature rule = shell_quadrature(k, radii.back(), opts);

  PointSampler sp = [&](const Vec3 &x) { return interpolate(sol.P_s, 0, x); };
  PointSampler sv = [&](const Vec3 &x) {
    Vec3 n = (x - opts.center).normalized();
    cplx s = 0.0;
    for (int a = 0; a < 3; a++)
      s += n[a] * interpolate(sol.v_s, a, x);
    return s;
  };
  SphericalWaves wp = fit_spherical_waves(sp, k, radius, opts, RadialBasis::Value, true);
  SphericalWaves wv = fit_spherical_waves(sv, k, radius, opts, RadialBasis::Derivative, true);

  AuxiliaryCheck out;
  double nPs = 0, nPi = 0, nVs = 0, nVi = 0, nrel = 0;
  cplx aux = 0.0;
  for (std::size_t p = 0; p < rule.size(); p++)
  {
    const Vec3 &n = rule.directions[p];
    const double wt = rule.weights[p];
    cplx Ps = wp.outgoing_amplitude(n), Pi = wp.incoming_amplitude(n);
    cplx Vs = k * wv.outgoing_amplitude(n), Vi = -k * wv.incoming_amplitude(n);
    aux += wt * (std::conj(Ps) * Vs - std::conj(Pi) * Vi);
    out.scale += wt * std::abs(Ps) * std::abs(Vs);
    nPs += wt * std::norm(Ps);
    nPi += wt * std::norm(Pi);
    nVs += wt * std::norm(Vs);
    nVi += wt * std::norm(Vi);
    nrel += wt * std::norm(Vs - w / sol.kappa0 * Ps);
  }
  out.auxiliary_term = I / k * aux;
  out.scale /= k;
  out.incoming_ratio = nPs > 0 ? std::sqrt(nPi / nPs) : 0.0;
  out.incoming_ratio_v = nVs > 0 ? std::sqrt(nVi / nVs) : 0.0;
  out.relation_error = nVs > 0 ? std::sqrt(nrel / nVs) : 0.0;

  // S(r) = ∮ -i P̄ n·v dS = -(k r²/(ωρ0)) Σ conj(a_lm) a_lm' from the pressure
  // coefficients; its weighted limit keeps |A|² - |B|².
  auto S_coeff = [&](double r) {
    cplx s = 0.0;
    for (int l = 0; l <= wp.lmax; l++)
    {
      cplx h1 = hankel1(l, k * r), d1 = hankel1_prime(l, k * r);
      if (!std::isfinite(std::abs(h1)) || std::abs(h1) > 1e150)
        continue;
      for (int m = -l; m <= l; m++)
      {
        int q = SphericalHarmonics::index(l, m);
        cplx A = wp.outgoing[q], B = wp.incoming.empty() ? 0.0 : wp.incoming[q];
        cplx a = A * h1 + B * std::conj(h1), da = A * d1 + B * std::conj(d1);
        s += std::conj(a) * da;
      }
    }
    return -k * r * r / (w * sol.rho0) * s;
  };
  cplx S_inf = 0.0;
  for (std::size_t q = 0; q < wp.outgoing.size(); q++)
    S_inf += std::norm(wp.outgoing[q]) -
             (wp.incoming.empty() ? 0.0 : std::norm(wp.incoming[q]));
  S_inf *= -I / (w * sol.rho0 * k);
  out.limit_term = S_inf;

  cplx ball = 0.0, surf = 0.0, tail = 0.0;
  for (double r : radii)
  {
    std::vector<double> bw = ball_weights(g, Ball{opts.center, r});
    cplx v = 0.0;
    for (std::size_t q = 0; q < g.node_count(); q++)
      if (bw[q] > 0)
        for (int a = 0; a < 4; a++)
          v += bw[q] * sol.J_s(q, a) * std::conj(sol.E_s(q, a));
    ball += v;
    cplx s = 0.0;
    for (std::size_t p = 0; p < rule.size(); p++)
    {
      Vec3 x = opts.center + r * rule.directions[p];
      s += rule.weights[p] * std::conj(sp(x)) * sv(x);
    }
    surf += -I * r * r * s;
    tail += S_inf - S_coeff(r);
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

nlohmann::json to_json(const OpticalTheorem &o)
{
  return {{"scattered", o.scattered},
          {"absorbed", o.absorbed},
          {"extinction_rhs", o.extinction_rhs},
          {"extinction_lhs", o.extinction_lhs},
          {"extinction_backward", o.extinction_backward},
          {"mismatch", o.mismatch},
          {"mismatch_backward", o.mismatch_backward}};
}

nlohmann::json to_json(const AuxiliaryCheck &a)
{
  return {{"defect", a.defect},
          {"key_identity", a.key_identity},
          {"incoming_ratio", a.incoming_ratio},
          {"incoming_ratio_v", a.incoming_ratio_v},
          {"relation_error", a.relation_error},
          {"scale", a.scale},
          {"ball_integral", to_json(a.ball_integral)},
          {"surface_term", to_json(a.surface_term)},
          {"limit_term", to_json(a.limit_term)},
          {"auxiliary_term", to_json(a.auxiliary_term)}};
}

}  // namespace atc
