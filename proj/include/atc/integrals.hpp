#pragma once

#include <vector>
#include "atc/field.hpp"
#include "atc/region.hpp"

namespace atc
{

// Sum over region nodes of f·conj(g) times the cell measure.
cplx inner_product(const Field &f, const Field &g, const Region &region);

// Same sum without conjugation (the pairing used by conservation identities).
cplx bilinear_integral(const Field &f, const Field &g, const Region &region);

// Integral of one component over the region.
cplx volume_integral(const Field &f, int component, const Region &region);

struct SurfaceOptions
{
  // Ball regions: relative half-width of the averaging shell; 0 integrates at the radius only.
  double shell_fraction = 0.0;
  int shell_radii = 5;
  // Wavenumber of oscillatory integrands; sizes the sphere rule.
  double k0 = 0.0;
  int min_points = 0;
};

// Outward flux of a tensor field through the region boundary, contracting the
// index in position `axis_slot` (extent 3) with the normal. Returns one value
// per remaining component.
//   Box: midpoint rule on faces half a spacing outside the outermost nodes,
//        face values averaged from the two straddling nodes; this makes the flux
//        equal the sum of central-difference divergences over the box exactly.
//   Ball: trilinear interpolation onto a product sphere rule (circle on planar grids).
std::vector<cplx> surface_flux(const Field &q, int axis_slot, const Region &region,
                               const SurfaceOptions &opts = {});

cplx surface_integral(const Field &v, const Region &region, const SurfaceOptions &opts = {});

// Radii used for shell averaging around r.
std::vector<double> shell_radii(double r, double shell_fraction, int count);

}  // namespace atc
