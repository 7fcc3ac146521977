#pragma once

#include <json.hpp>
#include <vector>
#include "atc/farfield.hpp"
#include "atc/field.hpp"
#include "atc/material.hpp"
#include "atc/region.hpp"

namespace atc
{

// Fluid with a density tensor and a bulk modulus per node. Time dependence
// e^{-iωt}: outgoing waves go as e^{ikr}, and a passive medium has
// Im κ ≤ 0 and Im ρ ⪰ 0, i.e. Im of the block law L = diag(-(ωρ)⁻¹, ω/κ) is ⪰ 0.
struct AcousticMedium
{
  TensorMap rho;    // background ρ0 I
  ScalarMap kappa;  // background κ0
  double omega = 1.0;

  double rho0() const { return rho.background()(0, 0).real(); }
  double kappa0() const { return kappa.background().real(); }
  double k0() const;
};

// Uniform medium on a grid.
AcousticMedium uniform_medium(const Grid &grid, double rho0, double kappa0, double omega);

// P^a = p e^{ik·x}, k = k0 d.
struct PlaneWave
{
  cplx amplitude = 1.0;
  Vec3 direction = Vec3(0, 0, 1);
  double k0 = 1.0;

  cplx pressure(const Vec3 &x) const;
};

// E = (∇P, P) and J = (-iv, -i∇·v) for the background medium.
struct AcousticFields
{
  Field E;
  Field J;
};

AcousticFields plane_wave_fields(const PlaneWave &pw, const Grid &grid, double rho0,
                                 double kappa0, double omega);

enum class SolverMethod
{
  Gmres,
  Born  // plain Neumann series of the volume equation
};

struct ScatteringOptions
{
  double tol = 1e-8;
  int max_iter = 500;
  int restart = 60;
  SolverMethod method = SolverMethod::Gmres;
  // Evaluate scattered fields on the whole grid; solves without them only
  // know the fields on the support.
  bool full_fields = true;
};

struct AcousticSolution
{
  Grid grid;
  bool has_support = false;
  Box support;
  double omega = 0.0, rho0 = 0.0, kappa0 = 0.0, k0 = 0.0;
  PlaneWave incident;
  bool density_contrast = false;

  // Support box: total fields (∇P, P) and contrasts κ0/κ - 1, ρ0ρ⁻¹ - I.
  Grid local;
  Field E_local;
  std::vector<cplx> dkappa;
  std::vector<Mat3c> drho;

  // Whole grid (full_fields): scattered pressure and velocity, and the block
  // fields E^s = (∇P^s, P^s), J^s = L E - L0 E^a.
  Field P_s;
  Field v_s;
  Field E_s;
  Field J_s;

  int iterations = 0;
  double residual = 0.0;
  double contraction = 0.0;
};

// Volume integral equation P = P^a + k0² g*(Δκ P) + ∇g*·(Δρ ∇P) on the
// support, with g = e^{ik0 r}/(4πr) and the singular cell integrated over a
// sphere of equal volume.
AcousticSolution solve_scattering(const AcousticMedium &medium, const PlaneWave &pw,
                                  const ScatteringOptions &opts = {});

// Far field by spherical-wave projection of P^s over a shell around `opts.center`.
FarFieldPattern farfield_direct(const AcousticSolution &sol, double radius,
                                const std::vector<Vec3> &directions,
                                const ShellOptions &opts = {},
                                FarFieldMethod method = FarFieldMethod::SphericalWave);
// Same on the projection's own sphere rule, with weights for power integrals.
FarFieldPattern farfield_direct(const AcousticSolution &sol, double radius,
                                const ShellOptions &opts = {});

// I1 = ((J^s - L0 E^s), E^a') over a region of the grid, E^a' the unit plane
// wave travelling along `direction`; returns P^s_∞(direction) = ωρ0 I1/(4π).
cplx farfield_via_identity(const AcousticSolution &sol, const Vec3 &direction);
cplx farfield_via_identity(const AcousticSolution &sol, const Vec3 &direction,
                           const Box &region);

// Scattered and absorbed power against the forward-amplitude extinction
// 2π Im[p̄ P^s_∞(d)]/(ωρ0); the backward amplitude is reported alongside.
struct OpticalTheorem
{
  double scattered = 0.0;
  double absorbed = 0.0;
  double extinction_rhs = 0.0;  // scattered + absorbed
  double extinction_lhs = 0.0;  // from P^s_∞(+d)
  double extinction_backward = 0.0;  // from P^s_∞(-d)
  double mismatch = 0.0;
  double mismatch_backward = 0.0;
};

// (ω/2) ∫ [v̄·(Im ρ) v + |P|² Im(1/κ)] over the support.
double absorbed_power(const AcousticSolution &sol);
// k0/(2ωρ0) ∫ |P^s_∞|² over a pattern with sphere weights.
double scattered_power(const FarFieldPattern &pattern, double omega, double rho0);
OpticalTheorem optical_theorem_check(const FarFieldPattern &pattern, const AcousticSolution &sol);

// Asymptotic components on a shell and the augmented inner product
//   ⟨J, E⟩ = lim (J^s, E^s)_r + (i/k0) ∫ [P̄^s V^s - P̄^i V^i]
// The limit is the ball integral at R plus the radial tail S(∞) - S(R), S the
// key-identity surface term ∮ -i P̄ n·v, evaluated from the pressure's
// spherical-wave coefficients. V comes from the normal velocity on the shell,
// independently of P.
struct AuxiliaryCheck
{
  double defect = 0.0;            // |⟨J, E⟩| / scale
  double key_identity = 0.0;      // |(J^s,E^s)_R - S(R)| / scale
  double incoming_ratio = 0.0;    // ‖P^i‖ / ‖P^s‖
  double incoming_ratio_v = 0.0;  // ‖V^i‖ / ‖V^s‖
  double relation_error = 0.0;    // ‖V^s - ωP^s/κ0‖ / ‖V^s‖
  double scale = 0.0;             // (1/k0) ∫ |P^s_∞||V^s_∞|
  cplx ball_integral = 0.0;
  cplx surface_term = 0.0;
  cplx limit_term = 0.0;
  cplx auxiliary_term = 0.0;
};

AuxiliaryCheck auxiliary_orthogonality_check(const AcousticSolution &sol, double radius,
                                             const ShellOptions &opts = {});

// Node weights h³ × (fraction of the node's cell inside the ball).
std::vector<double> ball_weights(const Grid &grid, const Ball &ball, int subsamples = 4);

nlohmann::json to_json(const OpticalTheorem &o);
nlohmann::json to_json(const AuxiliaryCheck &a);

}  // namespace atc
