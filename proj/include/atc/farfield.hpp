#pragma once

#include <functional>
#include <json.hpp>
#include <string>
#include <vector>
#include "atc/grid.hpp"
#include "atc/sphere.hpp"

namespace atc
{

// Shell of sampling spheres around a center: radii spread uniformly over
// [(1 - f)R, (1 + f)R].
struct ShellOptions
{
  Vec3 center = Vec3::Zero();
  double shell_fraction = 0.1;
  int radii = 5;
  // Polar nodes of the projection rule (at least; the rule also grows with kR).
  int min_polar_nodes = 24;
};

// Radial functions the shell samples are expanded in.
//   Value:      f = Σ (A h⁽¹⁾_l(kr) + B h⁽²⁾_l(kr)) Y_lm
//   Derivative: f = Σ (A h⁽¹⁾_l'(kr) + B h⁽²⁾_l'(kr)) Y_lm (radial derivatives,
//               e.g. the normal velocity of a pressure field)
enum class RadialBasis
{
  Value,
  Derivative
};

// Spherical-wave content of a radiating scalar outside a sphere.
struct SphericalWaves
{
  double k = 0.0;
  int lmax = 0;
  RadialBasis basis = RadialBasis::Value;
  std::vector<cplx> outgoing;  // A_lm, packed as SphericalHarmonics::index
  std::vector<cplx> incoming;  // B_lm
  // Degrees up to which outgoing and incoming parts were fitted separately;
  // above it the radial functions are numerically parallel over the shell and
  // the content is assigned to the outgoing part.
  int split_lmax = -1;

  // Coefficient of e^{ikr}/r (outgoing) or e^{-ikr}/r (incoming) along a direction.
  cplx outgoing_amplitude(const Vec3 &direction) const;
  cplx incoming_amplitude(const Vec3 &direction) const;
  // The expansion itself at an offset from the shell center.
  cplx value(const Vec3 &offset) const;
};

using PointSampler = std::function<cplx(const Vec3 &x)>;

// Project samples on each shell radius onto Y_lm and fit the radial basis.
// With split = false (or a single radius) only outgoing waves are fitted,
// averaged over the shell.
SphericalWaves fit_spherical_waves(const PointSampler &sample, double k, double radius,
                                   const ShellOptions &opts, RadialBasis basis, bool split);

// Shell average of r e^{-ikr} f(c + r n): the plain asymptotic estimate, exact
// only as kR → ∞.
std::vector<cplx> asymptotic_amplitudes(const PointSampler &sample, double k, double radius,
                                        const ShellOptions &opts,
                                        const std::vector<Vec3> &directions);

// Projection rule used for a shell of outer radius r.
SphereQuadrature shell_quadrature(double k, double outer_radius, const ShellOptions &opts);

enum class FarFieldMethod
{
  SphericalWave,
  Asymptotic
};

// Scalar far-field amplitudes on a set of directions.
struct FarFieldPattern
{
  std::vector<Vec3> directions;
  std::vector<double> weights;  // sum to 4π when the directions are a sphere rule
  std::vector<cplx> amplitudes;
  double k0 = 0.0;
  double radius = 0.0;
  FarFieldMethod method = FarFieldMethod::SphericalWave;
  SphericalWaves waves;  // empty for the asymptotic method

  // ∫ |amplitude|² over the sphere (needs weights).
  double power_integral() const;
  double max_abs() const;
};

// Pattern evaluated on a sphere rule (weights kept) or on bare directions.
FarFieldPattern make_pattern(const SphericalWaves &waves, const SphereQuadrature &rule,
                             double radius);
FarFieldPattern make_pattern(const SphericalWaves &waves, const std::vector<Vec3> &directions,
                             double radius);

// Roughly uniform set of n unit vectors (Fibonacci spiral).
std::vector<Vec3> spiral_directions(int n);

// CSV rows theta, phi, re, im and a JSON sidecar (k0, radius, method, `extra`).
void export_pattern(const FarFieldPattern &pattern, const std::string &csv_path,
                    const std::string &json_path,
                    const nlohmann::json &extra = nlohmann::json::object());

}  // namespace atc
