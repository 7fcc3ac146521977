#include "atc/region.hpp"

#include <cmath>
#include <string>
#include "atc/errors.hpp"

namespace atc
{

Box whole_grid(const Grid &grid)
{
  return Box{{0, 0, 0}, {grid.dim(0) - 1, grid.dim(1) - 1, grid.dim(2) - 1}};
}

Box interior_box(const Grid &grid, int margin)
{
  Box b = whole_grid(grid);
  for (int a = 0; a < grid.dimension(); a++)
  {
    b.lo[a] += margin;
    b.hi[a] -= margin;
  }
  return b;
}

bool contains(const Grid &grid, const Region &region, const Index3 &node)
{
  if (const Box *b = std::get_if<Box>(&region))
    return b->contains(node);
  const Ball &ball = std::get<Ball>(region);
  Vec3 d = grid.position(node) - ball.center;
  if (grid.planar())
    d[2] = 0.0;
  return d.norm() <= ball.radius;
}

namespace
{

// Extent of the region in fractional node coordinates.
void region_span(const Grid &grid, const Region &region, double margin, Vec3 &lo, Vec3 &hi)
{
  if (const Box *b = std::get_if<Box>(&region))
  {
    for (int a = 0; a < 3; a++)
    {
      lo[a] = b->lo[a] - margin;
      hi[a] = b->hi[a] + margin;
    }
  }
  else
  {
    const Ball &ball = std::get<Ball>(region);
    Vec3 c = grid.to_index_space(ball.center);
    double r = ball.radius / grid.spacing() + margin;
    lo = c - Vec3::Constant(r);
    hi = c + Vec3::Constant(r);
  }
  if (grid.planar())
  {
    lo[2] = 0.0;
    hi[2] = 0.0;
  }
}

}  // namespace

void require_inside(const Grid &grid, const Region &region, const char *op)
{
  if (const Box *b = std::get_if<Box>(&region))
  {
    for (int a = 0; a < 3; a++)
      if (b->lo[a] < 0 || b->hi[a] >= grid.dim(a) || b->lo[a] > b->hi[a])
        throw InvalidArgument(std::string(op) + ": box outside grid along axis " +
                              std::to_string(a));
    return;
  }
  const Ball &ball = std::get<Ball>(region);
  if (!(ball.radius > 0.0))
    throw InvalidArgument(std::string(op) + ": ball radius must be positive");
  Vec3 lo, hi;
  region_span(grid, region, 0.0, lo, hi);
  for (int a = 0; a < grid.dimension(); a++)
    if (lo[a] < 0.0 || hi[a] > grid.dim(a) - 1)
      throw InvalidArgument(std::string(op) + ": ball outside grid along axis " +
                            std::to_string(a));
}

void require_strictly_interior(const Grid &grid, const Region &region, double margin,
                               const char *op)
{
  require_inside(grid, region, op);
  Vec3 lo, hi;
  region_span(grid, region, margin, lo, hi);
  for (int a = 0; a < grid.dimension(); a++)
    if (lo[a] < 0.0 || hi[a] > grid.dim(a) - 1)
      throw InvalidArgument(std::string(op) + ": region boundary touches the grid edge");
}

std::vector<std::size_t> region_nodes(const Grid &grid, const Region &region)
{
  std::vector<std::size_t> nodes;
  Box range = whole_grid(grid);
  if (const Box *b = std::get_if<Box>(&region))
    range = *b;
  for (int k = range.lo[2]; k <= range.hi[2]; k++)
    for (int j = range.lo[1]; j <= range.hi[1]; j++)
      for (int i = range.lo[0]; i <= range.hi[0]; i++)
        if (contains(grid, region, {i, j, k}))
          nodes.push_back(grid.index(i, j, k));
  return nodes;
}

bool bounding_box(const Grid &grid, const std::vector<bool> &mask, Box &out)
{
  bool any = false;
  Box b{{grid.dim(0), grid.dim(1), grid.dim(2)}, {-1, -1, -1}};
  for (std::size_t n = 0; n < mask.size(); n++)
  {
    if (!mask[n])
      continue;
    any = true;
    Index3 idx = grid.unravel(n);
    for (int a = 0; a < 3; a++)
    {
      b.lo[a] = std::min(b.lo[a], idx[a]);
      b.hi[a] = std::max(b.hi[a], idx[a]);
    }
  }
  if (any)
    out = b;
  return any;
}

}  // namespace atc
