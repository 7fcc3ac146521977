#pragma once

#include <string>
#include <vector>
#include "atc/field.hpp"
#include "atc/material.hpp"
#include "atc/projections.hpp"

namespace atc
{

// Conductivity problem on a box: find V with ∇·(σ∇V) = 0 inside and given
// values on the box faces. σ is real symmetric positive definite per node.
struct ConductivityProblem
{
  TensorMap sigma;
  Box domain;
  double reference_sigma = 0.0;  // 0 selects (σ_min + σ_max)/2
  double tol = 1e-10;
  int max_iter = 2000;
};

// Eigenvalue bounds of σ over the nodes of the domain.
void sigma_bounds(const ConductivityProblem &problem, double &sigma_min, double &sigma_max);

// Nodes on the faces of the box, ordered by z, then y, then x.
std::vector<Index3> boundary_nodes(const Grid &grid, const Box &box);

// Potential that is discretely harmonic (7-point Laplacian) inside the box and
// takes the given values on the boundary nodes (in boundary_nodes order).
Field harmonic_lift(const Grid &grid, const Box &box, const std::vector<cplx> &boundary_V);

// Boundary samples of a potential given as a function of position.
template <class Fn>
std::vector<cplx> boundary_samples(const Grid &grid, const Box &box, Fn &&fn)
{
  std::vector<cplx> v;
  for (const Index3 &n : boundary_nodes(grid, box))
    v.push_back(fn(grid.position(n)));
  return v;
}

using ConductivityOperator = CellOperator;

struct DirichletSolution
{
  Field V;  // potential on the box nodes
  Field e;  // -∇V on box edges
  Field j;  // σe on box edges
  int iterations = 0;
  double update = 0.0;       // last relative update
  double contraction = 0.0;  // ratio of the last two updates
};

// Fixed-point series e <- u_e + Γ₁′[(1 - σ/σ_ref) e] with u_e the gradient of
// the harmonic lift of the boundary data.
DirichletSolution solve_dirichlet(const ConductivityProblem &problem,
                                  const std::vector<cplx> &boundary_V);

// Flux into the body per boundary node, σ∂V/∂n integrated over the node's
// share of the boundary and divided by h². Computed from the discrete
// current balance at boundary nodes, so it is consistent with the volume power.
std::vector<cplx> neumann_data(const ConductivityProblem &problem, const DirichletSolution &sol);

struct DtnMap
{
  std::vector<Index3> boundary_nodes;
  std::vector<Vec3> positions;
  // Dense map (N_b × N_b), or N_b × m images of a probe basis.
  Eigen::MatrixXcd matrix;
  bool probed = false;
};

struct DtnOptions
{
  // Columns of boundary data to push through the map; empty assembles every column.
  Eigen::MatrixXcd probe_basis;
  std::size_t dense_limit = 20000;
};

DtnMap assemble_dtn(const ConductivityProblem &problem, const DtnOptions &opts = {});

// CSV of the dense matrix plus a JSON sidecar listing boundary node coordinates.
void export_dtn(const DtnMap &map, const std::string &csv_path, const std::string &json_path);

// Power dissipated in the box, ∫ σe·ē dx, for the solve driven by v_e.
double y_power(const ConductivityProblem &problem, const std::vector<cplx> &v_e);
double dissipated_power(const ConductivityProblem &problem, const DirichletSolution &sol);

// ∮ V̄ σ∂V/∂n dS with the normal flux from one-sided second-order differences of
// V and trapezoid weights on each face; independent of the discrete current balance.
double boundary_power(const ConductivityProblem &problem, const DirichletSolution &sol);

}  // namespace atc
