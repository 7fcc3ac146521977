#pragma once

#include <vector>
#include "atc/field.hpp"
#include "atc/grid.hpp"
#include "atc/region.hpp"

namespace atc
{

// How a partially covered boundary cell blends the shape value with what was there.
//   Arithmetic: value mixes linearly (sigma, epsilon).
//   Harmonic:   the inverse mixes linearly (density, bulk modulus), which keeps
//               the scattering contrast linear in the covered fraction.
enum class Mixing
{
  Arithmetic,
  Harmonic
};

// Coefficient per grid node with a declared background value.
template <class T>
class MaterialMap
{
public:
  MaterialMap() = default;
  MaterialMap(const Grid &grid, const T &background)
    : grid_(grid), background_(background), values_(grid.node_count(), background)
  {
  }

  const Grid &grid() const { return grid_; }
  const T &background() const { return background_; }
  const T &operator[](std::size_t node) const { return values_[node]; }
  T &operator[](std::size_t node) { return values_[node]; }
  const std::vector<T> &values() const { return values_; }

  bool is_background(std::size_t node) const;
  // Nodes whose value differs from the background; false if there are none.
  bool support(Box &out) const;
  bool uniform() const
  {
    Box b;
    return !support(b);
  }

private:
  Grid grid_;
  T background_{};
  std::vector<T> values_;
};

using TensorMap = MaterialMap<Mat3c>;
using ScalarMap = MaterialMap<cplx>;

void paint_ball(TensorMap &map, const Ball &ball, const Mat3c &value, Mixing mixing,
                int subsamples = 8);
void paint_ball(ScalarMap &map, const Ball &ball, cplx value, Mixing mixing, int subsamples = 8);

// Axis-aligned box given by physical corner coordinates.
void paint_box(TensorMap &map, const Vec3 &lo, const Vec3 &hi, const Mat3c &value,
               Mixing mixing, int subsamples = 8);
void paint_box(ScalarMap &map, const Vec3 &lo, const Vec3 &hi, cplx value, Mixing mixing,
               int subsamples = 8);

// Half-space {x : normal·x > offset}.
void paint_half_space(TensorMap &map, const Vec3 &normal, double offset, const Mat3c &value,
                      Mixing mixing, int subsamples = 8);

Mat3c isotropic(cplx value);

// Tensor coefficient acting on staggered edge fields of a box (component a
// at node n lives at x_n + (h/2)e_a). Cell tensors are averages of their
// corner nodes; the energy of a cell couples each edge to its own component
// and to the cell-averaged other components, so h³ eᴴ(Te) is ∫ ē·(tensor)e.
// `subtract` is removed from every node value first (a background).
//   CellAverage:  the own-component coefficient of an edge is the cell mean, like
//                 every other entry.
//   EdgeHarmonic: it is the harmonic mean of the edge's two end nodes (then
//                 averaged over the cell's parallel edges), which follows the
//                 series rule for fields crossing an interface.
enum class DiagonalRule
{
  CellAverage,
  EdgeHarmonic
};

class CellOperator
{
public:
  CellOperator(const TensorMap &tensor, const Box &domain, const Mat3c &subtract = Mat3c::Zero(),
               DiagonalRule rule = DiagonalRule::CellAverage);
  void apply(const Field &e, Field &out) const;
  const Box &domain() const { return domain_; }
  // Share of each edge covered by box cells (1 inside, 1/2 on faces, 1/4 on box edges).
  const Field &edge_weight() const { return weight_; }

private:
  Grid grid_;
  Box domain_;
  std::vector<Mat3c> cells_;
  Field weight_;
};

}  // namespace atc
