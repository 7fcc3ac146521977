#pragma once

#include <memory>
#include "atc/field.hpp"
#include "atc/region.hpp"

namespace atc
{

namespace fft
{
class Dst1Plan;
}

// Periodic projection onto gradient fields: p̂(k) -> k(k·p̂)/|k|², using the
// same wavenumbers as spectral differentiation; the mean and Nyquist modes map to zero.
Field gamma1_fourier(const Field &p);

// Solver for the 7-point (5-point planar) Laplacian on the interior nodes of a
// box with zero values on the box faces, diagonalized by sine transforms.
class DirichletPoisson
{
public:
  DirichletPoisson(const Grid &grid, const Box &domain);
  ~DirichletPoisson();

  const Box &domain() const { return domain_; }
  // Solve ∇²V = rhs; rhs is read on interior nodes, V is zero elsewhere.
  void solve(const std::vector<cplx> &rhs, std::vector<cplx> &V);
  bool is_interior(const Index3 &n) const;

private:
  Grid grid_;
  Box domain_;
  std::vector<int> extents_;     // interior node counts, slowest first
  std::vector<double> inv_eig_;  // normalized inverse eigenvalues
  std::unique_ptr<fft::Dst1Plan> plan_;
};

Field poisson_dirichlet(const Field &rhs, const Box &domain);

// Bounded-domain projection onto gradients of potentials vanishing on the box
// faces: e = G L⁻¹ D p with G the forward gradient, D the backward divergence
// and L = D G. Edge fields are staggered: component a at node n lives at
// x_n + (h/2) e_a.
Field gamma1_dirichlet(const Field &p, const Box &domain);

// Same projection, reusing a solver and also returning the potential V with e = -G V.
Field gamma1_dirichlet(const Field &p, DirichletPoisson &solver, Field *potential = nullptr);

struct ProjectionKind
{
  enum Kind
  {
    FourierPeriodic,
    DirichletDomain
  } kind = FourierPeriodic;
  Box domain;
};

Field apply_projection(const ProjectionKind &kind, const Field &p);

}  // namespace atc
