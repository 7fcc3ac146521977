#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <Eigen/Dense>

namespace atc
{

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Vec3c = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;
using Mat3c = Eigen::Matrix3cd;
using Index3 = std::array<int, 3>;

// Plain (bilinear) cross product; Eigen's cross conjugates complex results.
inline Vec3c cross(const Vec3c &a, const Vec3c &b)
{
  return Vec3c(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]);
}

// Uniform Cartesian lattice. A grid with a single node along z is a planar
// (two-dimensional) grid; everything else needs at least 4 nodes per axis.
class Grid
{
public:
  Grid() = default;
  Grid(Index3 dims, double spacing, Vec3 origin = Vec3::Zero());

  // Grid of the given dims centered on the coordinate origin.
  static Grid centered(Index3 dims, double spacing);

  const Index3 &dims() const { return dims_; }
  int dim(int axis) const { return dims_[axis]; }
  double spacing() const { return h_; }
  const Vec3 &origin() const { return origin_; }

  std::size_t node_count() const
  {
    return std::size_t(dims_[0]) * std::size_t(dims_[1]) * std::size_t(dims_[2]);
  }
  bool planar() const { return dims_[2] == 1; }
  int dimension() const { return planar() ? 2 : 3; }
  // Volume (area for planar grids) attributed to one node.
  double cell_measure() const;

  std::size_t index(int i, int j, int k) const
  {
    return (std::size_t(k) * dims_[1] + j) * dims_[0] + i;
  }
  std::size_t index(const Index3 &n) const { return index(n[0], n[1], n[2]); }
  Index3 unravel(std::size_t idx) const;

  Vec3 position(int i, int j, int k) const
  {
    return origin_ + h_ * Vec3(i, j, k);
  }
  Vec3 position(const Index3 &n) const { return position(n[0], n[1], n[2]); }
  // Fractional node coordinates of a point.
  Vec3 to_index_space(const Vec3 &x) const { return (x - origin_) / h_; }

  bool operator==(const Grid &o) const
  {
    return dims_ == o.dims_ && h_ == o.h_ && origin_ == o.origin_;
  }
  bool operator!=(const Grid &o) const { return !(*this == o); }

private:
  Index3 dims_{0, 0, 0};
  double h_ = 0.0;
  Vec3 origin_ = Vec3::Zero();
};

}  // namespace atc
