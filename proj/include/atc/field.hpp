#pragma once

#include <string>
#include <vector>
#include "atc/grid.hpp"

namespace atc
{

// What the per-node tuple of a field holds.
//   AcousticBlock: (dP/dx, dP/dy, dP/dz, P), or (-i v, -i div v) for its flux partner.
//   EmBlock:       (e, curl e), or (i curl h, -i h) for its flux partner.
enum class Layout
{
  Scalar,
  Vector,
  AcousticBlock,
  EmBlock,
  Tensor
};

std::string to_string(Layout layout);
Layout layout_from_string(const std::string &name);

// Complex samples on a grid, one tuple of `components()` values per node,
// stored node-major.
class Field
{
public:
  Field() = default;
  Field(const Grid &grid, Layout layout, std::vector<int> shape = {});

  static Field scalar(const Grid &grid) { return Field(grid, Layout::Scalar); }
  static Field vector(const Grid &grid) { return Field(grid, Layout::Vector); }
  static Field tensor(const Grid &grid, std::vector<int> shape)
  {
    return Field(grid, Layout::Tensor, std::move(shape));
  }

  const Grid &grid() const { return grid_; }
  Layout layout() const { return layout_; }
  // Tensor shape; {} for scalars, {3} vectors, {4}/{6} blocks.
  const std::vector<int> &shape() const { return shape_; }
  int components() const { return ncomp_; }
  std::size_t size() const { return data_.size(); }

  cplx &operator()(std::size_t node, int c) { return data_[node * ncomp_ + c]; }
  const cplx &operator()(std::size_t node, int c) const { return data_[node * ncomp_ + c]; }
  cplx &at(int i, int j, int k, int c = 0) { return (*this)(grid_.index(i, j, k), c); }
  const cplx &at(int i, int j, int k, int c = 0) const
  {
    return (*this)(grid_.index(i, j, k), c);
  }

  std::vector<cplx> &data() { return data_; }
  const std::vector<cplx> &data() const { return data_; }

  // Copy of one component as a flat node array.
  std::vector<cplx> component(int c) const;
  void set_component(int c, const std::vector<cplx> &values);

  // Same grid and layout (and tensor shape).
  bool compatible(const Field &o) const
  {
    return grid_ == o.grid_ && layout_ == o.layout_ && shape_ == o.shape_;
  }

  Field &operator+=(const Field &o);
  Field &operator-=(const Field &o);
  Field &operator*=(cplx s);

  double norm() const;  // plain l2 norm of all samples
  double max_abs() const;

private:
  Grid grid_;
  Layout layout_ = Layout::Scalar;
  std::vector<int> shape_;
  int ncomp_ = 1;
  std::vector<cplx> data_;
};

Field operator+(Field a, const Field &b);
Field operator-(Field a, const Field &b);
Field operator*(cplx s, Field a);

void require_compatible(const Field &a, const Field &b, const char *op);
void require_layout(const Field &f, Layout layout, const char *op);

// Fill from a function of position; `fn(x, tuple)` writes the node tuple.
template <class Fn>
Field sample(const Grid &grid, Layout layout, Fn &&fn, std::vector<int> shape = {})
{
  Field f(grid, layout, std::move(shape));
  for (int k = 0; k < grid.dim(2); k++)
    for (int j = 0; j < grid.dim(1); j++)
      for (int i = 0; i < grid.dim(0); i++)
      {
        fn(grid.position(i, j, k), &f(grid.index(i, j, k), 0));
      }
  return f;
}

}  // namespace atc
