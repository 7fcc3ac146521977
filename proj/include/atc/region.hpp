#pragma once

#include <variant>
#include <vector>
#include "atc/grid.hpp"

namespace atc
{

// Inclusive range of node indices. The control volume of a box extends half a
// spacing past its outermost nodes, so its volume is (node count)·h³.
struct Box
{
  Index3 lo{0, 0, 0};
  Index3 hi{0, 0, 0};

  int extent(int axis) const { return hi[axis] - lo[axis] + 1; }
  std::size_t node_count() const
  {
    return std::size_t(extent(0)) * extent(1) * extent(2);
  }
  bool contains(const Index3 &n) const
  {
    for (int a = 0; a < 3; a++)
      if (n[a] < lo[a] || n[a] > hi[a])
        return false;
    return true;
  }
};

// Closed ball (a disk on planar grids, where the z coordinate is ignored).
struct Ball
{
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

using Region = std::variant<Box, Ball>;

// Box covering every node of the grid.
Box whole_grid(const Grid &grid);

// Box of nodes at least `margin` nodes away from each grid face (planar axes excepted).
Box interior_box(const Grid &grid, int margin);

bool contains(const Grid &grid, const Region &region, const Index3 &node);

// Throws unless the region lies inside the grid.
void require_inside(const Grid &grid, const Region &region, const char *op);

// Throws unless the region's boundary, plus `margin` spacings, stays off the grid edge.
void require_strictly_interior(const Grid &grid, const Region &region, double margin,
                               const char *op);

std::vector<std::size_t> region_nodes(const Grid &grid, const Region &region);

// Smallest box holding every node where `mask` is set; false if the mask is empty.
bool bounding_box(const Grid &grid, const std::vector<bool> &mask, Box &out);

}  // namespace atc
