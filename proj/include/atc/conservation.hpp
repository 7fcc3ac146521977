#pragma once

#include <string>
#include <vector>
#include "atc/calculus.hpp"
#include "atc/integrals.hpp"

namespace atc
{

// Paired volume and boundary integrals of a supercurrent Q.
struct ConservationReport
{
  std::string identity;
  Region region;
  Eigen::MatrixXcd volume_integral;   // ∫ paired product
  Eigen::MatrixXcd surface_integral;  // ∮ Q·n
  double pointwise_residual_norm = 0.0;  // max |div Q - paired| over interior region nodes
  double discrepancy = 0.0;
  // ‖W + Wᵀ‖/‖W‖ of the volume integral, for identities whose W is antisymmetric.
  double antisymmetry = -1.0;
};

// {identity, region, W_volume, W_surface, discrepancy, pointwise_residual}
std::string report_json(const ConservationReport &r);

struct AuditOptions
{
  std::string identity = "custom";
  // Index of Q contracted by the divergence; -1 picks 0 for vectors and 1 for rank-3 tensors.
  int axis_slot = -1;
  double floor = 1e-300;
  SurfaceOptions surface;
};

// ∮ Q·n dS against ∫ paired dx on the region.
ConservationReport audit(const Field &Q, const Field &paired, const Region &region,
                         const AuditOptions &opts = {});

// Q = -V j. `warning` receives a note when div j is not small on the grid interior.
Field conductivity_supercurrent(const Field &V, const Field &j, std::string *warning = nullptr,
                                double tolerance = 1e-6);

// Number of field components per node seen as an n-vector.
int vector_count(const Field &u);

// Q[a,i,b] = u0[a] J0[i,b] for u0 with n components and J0 of shape {3, n}.
Field matrix_supercurrent(const Field &u0, const Field &J0);

// Paired product (∇u0)ᵀJ0, i.e. Σ_i ∂_i u0[a] J0[i,b], with the given derivative.
Field gradient_pairing(const Field &u0, const Field &J0, Diff mode = Diff::Central);

struct SupercurrentAudit
{
  Field Q;
  Field paired;
  ConservationReport report;
};

// Planar fields u0, v0 with n components; w = (u0, v0) and
// Q[A,i,B] = w_A (R⊥∇w_B)_i with R⊥ = [[0, 1], [-1, 0]]. W is 2n×2n antisymmetric.
SupercurrentAudit antisymmetric_supercurrent_2d(const Field &u0, const Field &v0,
                                                const Region &region,
                                                Diff mode = Diff::Central);

// Q[a,i,b] = u0[a] (A∇u0[b])_i for antisymmetric A; W[a,b] = ∫ ∇u0[a]ᵀ A ∇u0[b].
SupercurrentAudit antisymmetric_supercurrent_3d(const Field &u0, const Mat3 &A,
                                                const Region &region,
                                                Diff mode = Diff::Central);

// Structural families of key identities audited pointwise.
//   Gradient:  (∇u)ᵀR + u ∇·R = ∇·(u⊗R); u has n components, R shape {3, n}.
//   Curl:      -(∇×r)·u + r·(∇×u) = ∇·(u×r); u, r vector fields.
//   SpaceTime: (∇u)ᵀ ∂r/∂t - ∂u/∂t ∇·r = ∇·(-∂u/∂t ⊗ r) + ∂/∂t((∇u)ᵀr); u has n
//              components, r shape {3, n}.
enum class KeyIdentity
{
  Gradient,
  Curl,
  SpaceTime
};

// Snapshots of one field on a common grid at uniform time steps; time is
// differentiated like a space axis.
struct SpaceTimeField
{
  std::vector<Field> frames;
  double dt = 0.0;
};

// Max over interior nodes of |left side - ∇·Q|, all derivatives by central differences.
double key_identity_residual(const Field &u, const Field &R, KeyIdentity variant);
double key_identity_residual(const SpaceTimeField &u, const SpaceTimeField &r,
                             KeyIdentity variant);

}  // namespace atc
