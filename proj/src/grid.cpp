#include "atc/grid.hpp"

#include <cmath>
#include <string>
#include "atc/errors.hpp"

namespace atc
{

Grid::Grid(Index3 dims, double spacing, Vec3 origin)
  : dims_(dims), h_(spacing), origin_(origin)
{
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw InvalidArgument("grid spacing must be positive and finite");
  for (int a = 0; a < 3; a++)
  {
    bool planar_axis = (a == 2 && dims[a] == 1);
    if (dims[a] < 4 && !planar_axis)
      throw InvalidArgument("grid needs at least 4 nodes along axis " + std::to_string(a));
  }
  if (!origin.allFinite())
    throw InvalidArgument("grid origin must be finite");
}

Grid Grid::centered(Index3 dims, double spacing)
{
  Vec3 o;
  for (int a = 0; a < 3; a++)
    o[a] = -0.5 * (dims[a] - 1) * spacing;
  return Grid(dims, spacing, o);
}

double Grid::cell_measure() const
{
  return planar() ? h_ * h_ : h_ * h_ * h_;
}

Index3 Grid::unravel(std::size_t idx) const
{
  Index3 n;
  n[0] = int(idx % dims_[0]);
  idx /= dims_[0];
  n[1] = int(idx % dims_[1]);
  n[2] = int(idx / dims_[1]);
  return n;
}

}  // namespace atc
