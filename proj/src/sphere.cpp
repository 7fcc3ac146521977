#include "atc/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include "atc/errors.hpp"

namespace atc
{

namespace
{

// Legendre polynomial P_n and its derivative at x.
void legendre(int n, double x, double &p, double &dp)
{
  double p0 = 1.0, p1 = x;
  if (n == 0)
  {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; k++)
  {
    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

void gauss_legendre(int n, std::vector<double> &nodes, std::vector<double> &weights)
{
  if (n < 1)
    throw InvalidArgument("gauss_legendre: need at least one node");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; i++)
  {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p, dp;
    for (int it = 0; it < 100; it++)
    {
      legendre(n, x, p, dp);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    legendre(n, x, p, dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  if (n % 2 == 1)
    nodes[n / 2] = 0.0;
}

SphereQuadrature SphereQuadrature::product(int n_theta)
{
  if (n_theta < 2)
    throw InvalidArgument("sphere quadrature needs at least 2 polar nodes");
  SphereQuadrature q;
  q.n_theta = n_theta;
  q.n_phi = 2 * n_theta;
  std::vector<double> x, w;
  gauss_legendre(n_theta, x, w);
  const double dphi = 2.0 * std::numbers::pi / q.n_phi;
  for (int t = 0; t < n_theta; t++)
  {
    double ct = x[t], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    double th = std::acos(ct);
    for (int p = 0; p < q.n_phi; p++)
    {
      double ph = (p + 0.5) * dphi;
      q.directions.emplace_back(st * std::cos(ph), st * std::sin(ph), ct);
      q.weights.push_back(w[t] * dphi);
      q.theta.push_back(th);
      q.phi.push_back(ph);
    }
  }
  return q;
}

SphereQuadrature SphereQuadrature::with_points(int points)
{
  int n = 2;
  while (2 * n * n < points)
    n++;
  return product(n);
}

SphereQuadrature SphereQuadrature::for_radius(double k0, double radius, int min_points)
{
  double m = k0 * radius + 8.0;
  int needed = int(std::ceil(2.0 * m * m));
  return with_points(std::max(needed, min_points));
}

CircleQuadrature CircleQuadrature::uniform(int n)
{
  CircleQuadrature q;
  const double d = 2.0 * std::numbers::pi / n;
  for (int p = 0; p < n; p++)
  {
    double ph = (p + 0.5) * d;
    q.directions.emplace_back(std::cos(ph), std::sin(ph), 0.0);
    q.weights.push_back(d);
  }
  return q;
}

std::vector<cplx> SphericalHarmonics::evaluate(const Vec3 &direction) const
{
  Vec3 n = direction.normalized();
  const double ct = std::clamp(n.z(), -1.0, 1.0);
  const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
  const double ph = std::atan2(n.y(), n.x());
  std::vector<cplx> y(count(), cplx(0.0));
  // normalized associated Legendre functions, Condon-Shortley phase included
  std::vector<double> pmm(lmax_ + 1);
  pmm[0] = std::sqrt(1.0 / (4.0 * std::numbers::pi));
  for (int m = 1; m <= lmax_; m++)
    pmm[m] = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st * pmm[m - 1];
  for (int m = 0; m <= lmax_; m++)
  {
    cplx e = std::polar(1.0, m * ph);
    double p_prev = 0.0, p_cur = pmm[m];
    for (int l = m; l <= lmax_; l++)
    {
      if (l > m)
      {
        double a = std::sqrt((4.0 * l * l - 1.0) / (double(l * l) - m * m));
        double b = std::sqrt((double((l - 1) * (l - 1)) - m * m) / (4.0 * (l - 1) * (l - 1) - 1.0));
        double p_next = a * (ct * p_cur - b * p_prev);
        p_prev = p_cur;
        p_cur = p_next;
      }
      cplx v = p_cur * e;
      y[index(l, m)] = v;
      if (m > 0)
        y[index(l, -m)] = (m % 2 ? -1.0 : 1.0) * std::conj(v);
    }
  }
  return y;
}

double bessel_j(int l, double x)
{
  return std::sph_bessel(unsigned(l), x);
}

double bessel_j_prime(int l, double x)
{
  if (l == 0)
    return -std::sph_bessel(1u, x);
  return std::sph_bessel(unsigned(l - 1), x) - (l + 1) / x * std::sph_bessel(unsigned(l), x);
}

cplx hankel1(int l, double x)
{
  return {std::sph_bessel(unsigned(l), x), std::sph_neumann(unsigned(l), x)};
}

cplx hankel2(int l, double x)
{
  return std::conj(hankel1(l, x));
}

cplx hankel1_prime(int l, double x)
{
  if (l == 0)
    return -hankel1(1, x);
  return hankel1(l - 1, x) - double(l + 1) / x * hankel1(l, x);
}

cplx hankel2_prime(int l, double x)
{
  return std::conj(hankel1_prime(l, x));
}

double polar_angle(const Vec3 &n)
{
  return std::acos(std::clamp(n.z() / n.norm(), -1.0, 1.0));
}

double azimuth(const Vec3 &n)
{
  return std::atan2(n.y(), n.x());
}

Vec3 theta_hat(const Vec3 &n)
{
  double th = polar_angle(n), ph = azimuth(n);
  return Vec3(std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th));
}

Vec3 phi_hat(const Vec3 &n)
{
  double ph = azimuth(n);
  return Vec3(-std::sin(ph), std::cos(ph), 0.0);
}

}  // namespace atc
