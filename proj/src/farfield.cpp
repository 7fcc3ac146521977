#include "atc/farfield.hpp"

#include <cmath>
#include <numbers>
#include "atc/errors.hpp"
#include "atc/field_io.hpp"
#include "atc/integrals.hpp"
#include "atc/json_format.hpp"

namespace atc
{

namespace
{

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

cplx radial(int l, double x, RadialBasis basis)
{
  return basis == RadialBasis::Value ? hankel1(l, x) : hankel1_prime(l, x);
}

// r e^{∓ikr} times the radial function tends to this constant over k
cplx out_factor(int l, RadialBasis basis)
{
  return std::pow(-I, basis == RadialBasis::Value ? l + 1 : l);
}

cplx in_factor(int l, RadialBasis basis)
{
  return std::pow(I, basis == RadialBasis::Value ? l + 1 : l);
}

bool finite(cplx z)
{
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

cplx pattern_sum(const SphericalWaves &w, const std::vector<cplx> &coef, const Vec3 &direction,
                 bool outgoing)
{
  if (coef.empty())
    return 0.0;
  SphericalHarmonics sh(w.lmax);
  std::vector<cplx> y = sh.evaluate(direction);
  cplx sum = 0.0;
  for (int l = 0; l <= w.lmax; l++)
  {
    cplx f = outgoing ? out_factor(l, w.basis) : in_factor(l, w.basis);
    for (int m = -l; m <= l; m++)
    {
      int idx = SphericalHarmonics::index(l, m);
      sum += f * coef[idx] * y[idx];
    }
  }
  return sum / w.k;
}

}  // namespace

cplx SphericalWaves::outgoing_amplitude(const Vec3 &direction) const
{
  return pattern_sum(*this, outgoing, direction, true);
}

cplx SphericalWaves::incoming_amplitude(const Vec3 &direction) const
{
  return pattern_sum(*this, incoming, direction, false);
}

cplx SphericalWaves::value(const Vec3 &offset) const
{
  const double r = offset.norm();
  if (outgoing.empty() || r == 0.0)
    return 0.0;
  SphericalHarmonics sh(lmax);
  std::vector<cplx> y = sh.evaluate(offset / r);
  cplx sum = 0.0;
  for (int l = 0; l <= lmax; l++)
  {
    cplx f = radial(l, k * r, basis);
    if (!finite(f))
      continue;
    for (int m = -l; m <= l; m++)
    {
      int idx = SphericalHarmonics::index(l, m);
      cplx c = outgoing[idx] * f;
      if (!incoming.empty())
        c += incoming[idx] * std::conj(f);
      sum += c * y[idx];
    }
  }
  return sum;
}

SphereQuadrature shell_quadrature(double k, double outer_radius, const ShellOptions &opts)
{
  SphereQuadrature q = SphereQuadrature::for_radius(k, outer_radius);
  if (q.n_theta < opts.min_polar_nodes)
    q = SphereQuadrature::product(opts.min_polar_nodes);
  return q;
}

SphericalWaves fit_spherical_waves(const PointSampler &sample, double k, double radius,
                                   const ShellOptions &opts, RadialBasis basis, bool split)
{
  if (!(k > 0.0) || !(radius > 0.0))
    throw InvalidArgument("fit_spherical_waves: wavenumber and radius must be positive");
  const std::vector<double> radii = shell_radii(radius, opts.shell_fraction, opts.radii);
  const SphereQuadrature rule = shell_quadrature(k, radii.back(), opts);
  SphericalWaves w;
  w.k = k;
  w.basis = basis;
  w.lmax = rule.max_degree();
  SphericalHarmonics sh(w.lmax);
  const int nc = sh.count();
  const std::size_t np = rule.size();

  std::vector<std::vector<cplx>> ylm(np);
  for (std::size_t p = 0; p < np; p++)
    ylm[p] = sh.evaluate(rule.directions[p]);

  // c[j][lm]: projection of the samples at radius j
  std::vector<std::vector<cplx>> c(radii.size(), std::vector<cplx>(nc, 0.0));
  for (std::size_t j = 0; j < radii.size(); j++)
    for (std::size_t p = 0; p < np; p++)
    {
      cplx f = sample(opts.center + radii[j] * rule.directions[p]) * rule.weights[p];
      if (f == 0.0)
        continue;
      for (int q = 0; q < nc; q++)
        c[j][q] += f * std::conj(ylm[p][q]);
    }

  w.outgoing.assign(nc, 0.0);
  w.incoming.assign(nc, 0.0);
  const bool separate = split && radii.size() > 1;
  bool splitting = separate;
  for (int l = 0; l <= w.lmax; l++)
  {
    std::vector<cplx> b1(radii.size());
    bool ok = true;
    for (std::size_t j = 0; j < radii.size(); j++)
    {
      b1[j] = radial(l, k * radii[j], basis);
      ok = ok && finite(b1[j]) && std::abs(b1[j]) < 1e250;
    }
    if (!ok)
      continue;  // content at this degree is negligible against the radial growth
    if (splitting)
    {
      // normal equations of the columns h⁽¹⁾, h⁽²⁾ = conj h⁽¹⁾ scaled to unit size per radius
      Eigen::Matrix2cd N = Eigen::Matrix2cd::Zero();
      std::vector<double> s(radii.size());
      for (std::size_t j = 0; j < radii.size(); j++)
      {
        s[j] = 1.0 / std::abs(b1[j]);
        cplx u1 = b1[j] * s[j], u2 = std::conj(b1[j]) * s[j];
        N(0, 0) += std::norm(u1);
        N(0, 1) += std::conj(u1) * u2;
        N(1, 0) += std::conj(u2) * u1;
        N(1, 1) += std::norm(u2);
      }
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(N, Eigen::EigenvaluesOnly);
      if (es.eigenvalues()(0) < 1e-6 * es.eigenvalues()(1))
        splitting = false;
      else
      {
        w.split_lmax = l;
        Eigen::Matrix2cd Ni = N.inverse();
        for (int m = -l; m <= l; m++)
        {
          int q = SphericalHarmonics::index(l, m);
          Eigen::Vector2cd rhs = Eigen::Vector2cd::Zero();
          for (std::size_t j = 0; j < radii.size(); j++)
          {
            cplx u1 = b1[j] * s[j], u2 = std::conj(b1[j]) * s[j], d = c[j][q] * s[j];
            rhs(0) += std::conj(u1) * d;
            rhs(1) += std::conj(u2) * d;
          }
          Eigen::Vector2cd ab = Ni * rhs;
          w.outgoing[q] = ab(0);
          w.incoming[q] = ab(1);
        }
        continue;
      }
    }
    double nn = 0.0;
    for (const cplx &b : b1)
      nn += std::norm(b);
    for (int m = -l; m <= l; m++)
    {
      int q = SphericalHarmonics::index(l, m);
      cplx num = 0.0;
      for (std::size_t j = 0; j < radii.size(); j++)
        num += std::conj(b1[j]) * c[j][q];
      w.outgoing[q] = num / nn;
    }
  }
  if (!separate)
    w.incoming.clear();
  return w;
}

std::vector<cplx> asymptotic_amplitudes(const PointSampler &sample, double k, double radius,
                                        const ShellOptions &opts,
                                        const std::vector<Vec3> &directions)
{
  const std::vector<double> radii = shell_radii(radius, opts.shell_fraction, opts.radii);
  std::vector<cplx> out(directions.size(), 0.0);
  for (std::size_t d = 0; d < directions.size(); d++)
  {
    for (double r : radii)
      out[d] += r * std::exp(-I * (k * r)) * sample(opts.center + r * directions[d]);
    out[d] /= double(radii.size());
  }
  return out;
}

double FarFieldPattern::power_integral() const
{
  if (weights.size() != amplitudes.size())
    throw InvalidArgument("FarFieldPattern: power integral needs quadrature weights");
  double s = 0.0;
  for (std::size_t i = 0; i < amplitudes.size(); i++)
    s += weights[i] * std::norm(amplitudes[i]);
  return s;
}

double FarFieldPattern::max_abs() const
{
  double m = 0.0;
  for (const cplx &a : amplitudes)
    m = std::max(m, std::abs(a));
  return m;
}

FarFieldPattern make_pattern(const SphericalWaves &waves, const std::vector<Vec3> &directions,
                             double radius)
{
  FarFieldPattern p;
  p.directions = directions;
  p.k0 = waves.k;
  p.radius = radius;
  p.waves = waves;
  for (const Vec3 &d : directions)
    p.amplitudes.push_back(waves.outgoing_amplitude(d));
  return p;
}

FarFieldPattern make_pattern(const SphericalWaves &waves, const SphereQuadrature &rule,
                             double radius)
{
  FarFieldPattern p = make_pattern(waves, rule.directions, radius);
  p.weights = rule.weights;
  return p;
}

std::vector<Vec3> spiral_directions(int n)
{
  std::vector<Vec3> d;
  const double golden = pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; i++)
  {
    double z = 1.0 - (2.0 * i + 1.0) / n;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    d.emplace_back(r * std::cos(golden * i), r * std::sin(golden * i), z);
  }
  return d;
}

void export_pattern(const FarFieldPattern &pattern, const std::string &csv_path,
                    const std::string &json_path, const nlohmann::json &extra)
{
  std::string csv = "theta,phi,re,im\n";
  char buf[128];
  for (std::size_t i = 0; i < pattern.directions.size(); i++)
  {
    const Vec3 &n = pattern.directions[i];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", polar_angle(n), azimuth(n),
                  pattern.amplitudes[i].real(), pattern.amplitudes[i].imag());
    csv += buf;
  }
  write_file_atomic(csv_path, csv);
  nlohmann::json j = extra;
  j["k0"] = pattern.k0;
  j["radius"] = pattern.radius;
  j["method"] = pattern.method == FarFieldMethod::SphericalWave ? "spherical-wave" : "asymptotic";
  j["directions"] = pattern.directions.size();
  if (pattern.method == FarFieldMethod::SphericalWave)
  {
    j["lmax"] = pattern.waves.lmax;
    j["split_lmax"] = pattern.waves.split_lmax;
  }
  write_file_atomic(json_path, dump_json(j));
}

}  // namespace atc
