#pragma once

#include <vector>
#include "atc/field.hpp"

namespace atc
{

// Discretization of a first derivative.
//   Spectral: periodic Fourier differentiation (Nyquist mode dropped).
//   Central:  second-order centered, second-order one-sided at the grid faces.
//   Forward/Backward: one-sided differences on a staggered lattice; samples
//   past the grid edge are taken as zero, which makes Forward and -Backward
//   exact adjoints.
enum class Diff
{
  Spectral,
  Central,
  Forward,
  Backward
};

// Derivative along `axis` of one flat node array. Planar grids have zero z-derivative.
std::vector<cplx> partial(const Grid &grid, const std::vector<cplx> &f, int axis, Diff mode);

// Spectral wavenumber used along an axis for index m (Nyquist mode returns 0).
double spectral_wavenumber(int m, int n, double spacing);

Field grad(const Field &f, Diff mode);
Field div(const Field &v, Diff mode);
Field curl(const Field &v, Diff mode);

// Divergence over the index in position `axis_slot` of a tensor field whose
// extent there is 3; result drops that index (scalar if nothing remains).
Field tensor_div(const Field &q, int axis_slot, Diff mode);

// Gradient of every component of a field; appends a trailing index of extent 3.
Field tensor_grad(const Field &f, Diff mode);

// 7-point Laplacian (5-point on planar grids) with zero values outside the grid.
Field laplacian(const Field &f);

cplx interpolate(const Field &f, int component, const Vec3 &x);

}  // namespace atc
