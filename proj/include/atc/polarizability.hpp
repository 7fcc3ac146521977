#pragma once

#include <json.hpp>
#include <vector>
#include "atc/field.hpp"
#include "atc/material.hpp"
#include "atc/sphere.hpp"

namespace atc
{

// Dielectric inclusion in free space driven by a uniform applied field e0.
struct InclusionProblem
{
  TensorMap epsilon;  // background must be epsilon0·I
  double epsilon0 = 1.0;
  Vec3c e0 = Vec3c(1.0, 0.0, 0.0);
  double omega = 0.0;  // only enters the absorbed power
};

struct QuasistaticOptions
{
  double tol = 1e-10;
  int max_iter = 600;
  int restart = 80;
  bool full_fields = true;  // also build e_s, d_s and phi_s on the whole grid
};

// Edge fields are staggered: component a at node n lives at x_n + (h/2)e_a.
struct QuasistaticSolution
{
  Box box;       // grid nodes around the support carrying the polarization
  Grid local;    // grid of those nodes
  Field e;       // total field e0 + e_s on `local` edges
  Field p;       // polarization (ε - ε0)e on `local` edges
  Field e_s;     // whole grid: -G φ_s, an exact discrete gradient
  Field d_s;     // whole grid: ε0 e_s + p
  Field phi_s;   // whole grid scattered potential at nodes
  int iterations = 0;
  double residual = 0.0;
  double contraction = 0.0;
};

// Solves e_s = -Γ₁[(ε/ε0 - 1)(e0 + e_s)] with the free-space projection
// Γ₁ = G Δ_h⁻¹ D, where Δ_h⁻¹ is convolution with the lattice Green's function
// of the 7-point Laplacian (so D(ε0 e_s + p) = 0 at every node). GMRES on the
// support; the plain series stalls at ε = 2ε0 where the contrast reaches 1.
QuasistaticSolution solve_quasistatic(const InclusionProblem &problem,
                                      const QuasistaticOptions &opts = {});

// b = ∫ (ε - ε0)(e0 + e_s) dx
Vec3c dipole_moment(const QuasistaticSolution &sol);

// Potential of the polarization at arbitrary points (direct dipole sum).
std::vector<cplx> scattered_potential(const QuasistaticSolution &sol, double epsilon0,
                                      const std::vector<Vec3> &points);

// Least-squares fit of V_s(x) ≈ β·(x - c)/(4π ε0 r³) to samples taken at
// x = c + r n over the directions n of a quadrature sphere.
Vec3c farfield_dipole_fit(const SphereQuadrature &quad, double radius,
                          const std::vector<cplx> &values, double epsilon0);

// Columns are the dipole moments for unit applied fields along x, y, z.
Mat3c polarizability_tensor(InclusionProblem problem, const QuasistaticOptions &opts = {});

// W = (ω/2) Im(ē0·α e0)
double absorbed_power(const Mat3c &alpha, const Vec3c &e0, double omega);
// W = (ω/2) ∫ Im(ε)|e|² dx from the volume fields
double absorbed_power_volume(const QuasistaticSolution &sol, double omega);

struct PolarizabilityResult
{
  Mat3c alpha = Mat3c::Zero();
  Vec3c b = Vec3c::Zero();
  double absorbed_power = 0.0;
};

nlohmann::json to_json(const PolarizabilityResult &r);

// Analytic sphere polarizability 4πε0 a³(ε1 - ε0)/(ε1 + 2ε0).
cplx clausius_mossotti(double radius, cplx epsilon1, double epsilon0);

}  // namespace atc
