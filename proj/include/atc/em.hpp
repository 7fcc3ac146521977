#pragma once

#include <json.hpp>
#include <string>
#include <vector>
#include "atc/acoustic.hpp"
#include "atc/farfield.hpp"
#include "atc/field.hpp"
#include "atc/material.hpp"
#include "atc/region.hpp"

namespace atc
{

// Permittivity and permeability per node, time dependence e^{-iωt}. Block
// fields are E = (e, ∇×e), J = (i∇×h, -ih) with L = diag(ωε, -(ωμ)⁻¹).
struct EmMedium
{
  TensorMap epsilon;  // background ε0 I
  TensorMap mu;       // background μ0 I
  double omega = 1.0;

  double eps0() const { return epsilon.background()(0, 0).real(); }
  double mu0() const { return mu.background()(0, 0).real(); }
  double k0() const;
};

EmMedium uniform_em_medium(const Grid &grid, double eps0, double mu0, double omega);

// e^a = e0 e^{ik·x}, with k ⊥ e0 and |k| = ω sqrt(ε0 μ0).
struct EmPlaneWave
{
  Vec3c e0 = Vec3c(1, 0, 0);
  Vec3 k0_vec = Vec3(0, 0, 1);

  double k0() const { return k0_vec.norm(); }
  Vec3 direction() const { return k0_vec / k0_vec.norm(); }
  Vec3c electric(const Vec3 &x) const;
  // h0 = k × e0/(ωμ0)
  Vec3c h0(double omega, double mu0) const;
};

struct EmFields
{
  Field E;  // EmBlock: e, ∇×e
  Field J;  // EmBlock: i∇×h, -ih
};

EmFields em_plane_wave_fields(const EmPlaneWave &pw, const Grid &grid, double eps0, double mu0,
                              double omega);

struct EmSolution
{
  Grid grid;
  bool has_support = false;
  Box support;
  double omega = 0.0, eps0 = 0.0, mu0 = 0.0, k0 = 0.0;
  EmPlaneWave incident;

  // Support box: total e and the contrast χ = ε/ε0 - I.
  Grid local;
  Field e_local;
  std::vector<Mat3c> chi;

  // Whole grid (full_fields): scattered e, h and the block fields
  // E^s = (e^s, ∇×e^s), J^s = L E - L0 E^a.
  Field e_s;
  Field h_s;
  Field E_s;
  Field J_s;

  int iterations = 0;
  double residual = 0.0;
  double contraction = 0.0;
};

// Electric-field volume equation e = e^a + (k0² + ∇∇) g*(χ e) on the support,
// dyadic kernel sampled at node offsets; the singular cell uses the
// equal-volume sphere, δ_ab (2k0² I_g/3 - 1/3)/h³. Throws UnsupportedMedium
// when μ differs from μ0 anywhere.
EmSolution solve_em_scattering(const EmMedium &medium, const EmPlaneWave &pw,
                               const ScatteringOptions &opts = {});

// Far-field vectors from a spherical-wave fit of each Cartesian component of
// e^s on a shell. The radial part n·e∞ is kept and reported, not projected out.
struct EmFarField
{
  std::vector<Vec3> directions;
  std::vector<double> weights;  // sphere rule weights when available
  std::vector<Vec3c> e_inf;
  std::vector<Vec3c> h_inf;  // k0 n × e∞/(ωμ0)
  std::vector<double> radial;  // |n·e∞| per direction
  double transversality = 0.0;  // max |n·e∞| / max |e∞|
  double k0 = 0.0, omega = 0.0, mu0 = 0.0, radius = 0.0;
  SphericalWaves waves[3];

  // ∫ |e∞|² over the sphere (needs weights).
  double power_integral() const;
  double max_abs() const;
};

EmFarField em_farfield_direct(const EmSolution &sol, double radius,
                              const std::vector<Vec3> &directions, const ShellOptions &opts = {});
EmFarField em_farfield_direct(const EmSolution &sol, double radius, const ShellOptions &opts = {});

// Radiated power k0/(2ωμ0) ∫ |e∞|².
double em_scattered_power(const EmFarField &far);
// (ω/2) ∫ ē·(Im ε) e over the support.
double em_absorbed_power(const EmSolution &sol);
// (1/2) Re ∮ n·(e^s × h̄^s) over a shell (averaged over its radii).
double em_shell_flux(const EmSolution &sol, double radius, const ShellOptions &opts = {});

// I1 = (J^s - L0 E^s, E^a') with E^a' the plane wave of polarization e0'
// travelling along `direction`; returns e^s_∞(direction)·ē0' = ωμ0 I1/(4π).
cplx em_farfield_via_identity(const EmSolution &sol, const Vec3 &direction, const Vec3c &probe);
cplx em_farfield_via_identity(const EmSolution &sol, const Vec3 &direction, const Vec3c &probe,
                              const Box &region);
// Full vector from the θ̂ and φ̂ probes.
Vec3c em_farfield_vector_via_identity(const EmSolution &sol, const Vec3 &direction);

// Augmented inner product ⟨J, E⟩ = lim (J^s, E^s)_r - i ∫ n·(h∞×ē∞) (outgoing
// and incoming parts), the auxiliary h∞ taken from e∞ by the far-field
// relations. (J^s, E^s)_r = ∮ i n·(h×ē), so the limit is ball(R) + S(∞) - S(R)
// with S(r) = ∮ i n·(h×ē) from separate fits of e^s and h^s.
struct EmAuxiliaryCheck
{
  double defect = 0.0;               // |⟨J, E⟩| / scale
  double key_identity = 0.0;         // |(J^s,E^s)_R - S(R)| / scale
  double incoming_ratio = 0.0;       // ‖e^i∞‖ / ‖e^s∞‖
  double incoming_ratio_h = 0.0;     // ‖h^i∞‖ / ‖h^s∞‖
  double relation_error = 0.0;       // ‖h^s∞ - k0 n×e^s∞/(ωμ0)‖ / ‖h^s∞‖
  double dual_relation_error = 0.0;  // ‖e^s∞ + k0 n×h^s∞/(ωε0)‖ / ‖e^s∞‖
  double transversality = 0.0;       // max |n·e∞| / max |e∞|
  double scale = 0.0;                // ∫ |e^s∞| |h^s∞|
  cplx ball_integral = 0.0;
  cplx surface_term = 0.0;
  cplx limit_term = 0.0;
  cplx auxiliary_term = 0.0;
};

EmAuxiliaryCheck em_auxiliary_orthogonality(const EmSolution &sol, double radius,
                                            const ShellOptions &opts = {});

// CSV rows theta, phi and Re/Im of (e·θ̂, e·φ̂), plus a JSON sidecar.
void export_em_pattern(const EmFarField &far, const std::string &csv_path,
                       const std::string &json_path,
                       const nlohmann::json &extra = nlohmann::json::object());

nlohmann::json to_json(const EmAuxiliaryCheck &a);

}  // namespace atc
