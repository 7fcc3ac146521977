#include "atc/field.hpp"

#include <cmath>
#include <numeric>
#include "atc/errors.hpp"

namespace atc
{

std::string to_string(Layout layout)
{
  switch (layout)
  {
    case Layout::Scalar:
      return "scalar";
    case Layout::Vector:
      return "vector";
    case Layout::AcousticBlock:
      return "acoustic-block";
    case Layout::EmBlock:
      return "em-block";
    case Layout::Tensor:
      return "tensor";
  }
  return "unknown";
}

Layout layout_from_string(const std::string &name)
{
  for (Layout l : {Layout::Scalar, Layout::Vector, Layout::AcousticBlock, Layout::EmBlock,
                   Layout::Tensor})
    if (to_string(l) == name)
      return l;
  throw InvalidArgument("unknown field layout '" + name + "'");
}

Field::Field(const Grid &grid, Layout layout, std::vector<int> shape)
  : grid_(grid), layout_(layout)
{
  switch (layout)
  {
    case Layout::Scalar:
      if (!shape.empty())
        throw InvalidArgument("scalar field takes no shape");
      break;
    case Layout::Vector:
      if (shape.empty())
        shape = {3};
      if (shape != std::vector<int>{3})
        throw InvalidArgument("vector field has shape {3}");
      break;
    case Layout::AcousticBlock:
      if (shape.empty())
        shape = {4};
      if (shape != std::vector<int>{4})
        throw InvalidArgument("acoustic block has shape {4}");
      break;
    case Layout::EmBlock:
      if (shape.empty())
        shape = {6};
      if (shape != std::vector<int>{6})
        throw InvalidArgument("em block has shape {6}");
      break;
    case Layout::Tensor:
      if (shape.empty())
        throw InvalidArgument("tensor field needs a shape");
      for (int s : shape)
        if (s <= 0)
          throw InvalidArgument("tensor extents must be positive");
      break;
  }
  shape_ = std::move(shape);
  ncomp_ = std::accumulate(shape_.begin(), shape_.end(), 1, std::multiplies<int>());
  data_.assign(grid_.node_count() * ncomp_, cplx(0.0));
}

std::vector<cplx> Field::component(int c) const
{
  std::vector<cplx> out(grid_.node_count());
  for (std::size_t n = 0; n < out.size(); n++)
    out[n] = data_[n * ncomp_ + c];
  return out;
}

void Field::set_component(int c, const std::vector<cplx> &values)
{
  if (values.size() != grid_.node_count())
    throw InvalidArgument("component length does not match grid");
  for (std::size_t n = 0; n < values.size(); n++)
    data_[n * ncomp_ + c] = values[n];
}

Field &Field::operator+=(const Field &o)
{
  require_compatible(*this, o, "field addition");
  for (std::size_t n = 0; n < data_.size(); n++)
    data_[n] += o.data_[n];
  return *this;
}

Field &Field::operator-=(const Field &o)
{
  require_compatible(*this, o, "field subtraction");
  for (std::size_t n = 0; n < data_.size(); n++)
    data_[n] -= o.data_[n];
  return *this;
}

Field &Field::operator*=(cplx s)
{
  for (auto &v : data_)
    v *= s;
  return *this;
}

double Field::norm() const
{
  double s = 0.0;
  for (const auto &v : data_)
    s += std::norm(v);
  return std::sqrt(s);
}

double Field::max_abs() const
{
  double m = 0.0;
  for (const auto &v : data_)
    m = std::max(m, std::abs(v));
  return m;
}

Field operator+(Field a, const Field &b)
{
  a += b;
  return a;
}

Field operator-(Field a, const Field &b)
{
  a -= b;
  return a;
}

Field operator*(cplx s, Field a)
{
  a *= s;
  return a;
}

void require_compatible(const Field &a, const Field &b, const char *op)
{
  if (a.grid() != b.grid())
    throw InvalidArgument(std::string(op) + ": fields live on different grids");
  if (a.layout() != b.layout() || a.shape() != b.shape())
    throw InvalidArgument(std::string(op) + ": layout mismatch (" + to_string(a.layout()) +
                          " vs " + to_string(b.layout()) + ")");
}

void require_layout(const Field &f, Layout layout, const char *op)
{
  if (f.layout() != layout)
    throw InvalidArgument(std::string(op) + ": expected " + to_string(layout) +
                          " field, got " + to_string(f.layout()));
}

}  // namespace atc
