#pragma once

#include <vector>
#include "atc/grid.hpp"

namespace atc
{

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double> &nodes, std::vector<double> &weights);

// Product rule on the unit sphere: Gauss-Legendre in cos(theta) times a
// uniform rule in phi with twice as many points. Integrates spherical
// harmonics of degree < n_theta exactly; weights sum to 4 pi.
struct SphereQuadrature
{
  int n_theta = 0;
  int n_phi = 0;
  std::vector<Vec3> directions;
  std::vector<double> weights;
  std::vector<double> theta;  // per direction
  std::vector<double> phi;    // per direction

  static SphereQuadrature product(int n_theta);
  // Smallest product rule with at least `points` directions.
  static SphereQuadrature with_points(int points);
  // Rule sized for oscillatory integrands at radius r: >= 2(k0 r + 8)^2 points.
  static SphereQuadrature for_radius(double k0, double radius, int min_points = 0);

  std::size_t size() const { return directions.size(); }
  // Largest spherical-harmonic degree the rule projects exactly.
  int max_degree() const { return n_theta - 1; }
};

// Uniform rule on the unit circle (weights sum to 2 pi).
struct CircleQuadrature
{
  std::vector<Vec3> directions;  // z component zero
  std::vector<double> weights;
  static CircleQuadrature uniform(int n);
};

// Complex orthonormal spherical harmonics Y_lm, m = -l..l, packed at l*l + l + m.
class SphericalHarmonics
{
public:
  explicit SphericalHarmonics(int lmax) : lmax_(lmax) {}
  int lmax() const { return lmax_; }
  int count() const { return (lmax_ + 1) * (lmax_ + 1); }
  static int index(int l, int m) { return l * l + l + m; }
  // All Y_lm at one direction (need not be normalized).
  std::vector<cplx> evaluate(const Vec3 &direction) const;

private:
  int lmax_;
};

// Spherical Hankel functions of the first (outgoing, exp(+ix)) and second kind.
cplx hankel1(int l, double x);
cplx hankel2(int l, double x);
cplx hankel1_prime(int l, double x);
cplx hankel2_prime(int l, double x);
double bessel_j(int l, double x);
double bessel_j_prime(int l, double x);

// Spherical angles of a unit vector and the associated orthonormal frame.
double polar_angle(const Vec3 &n);
double azimuth(const Vec3 &n);
Vec3 theta_hat(const Vec3 &n);
Vec3 phi_hat(const Vec3 &n);

}  // namespace atc
