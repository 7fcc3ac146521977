#include "atc/material.hpp"

#include <cmath>
#include "atc/errors.hpp"

namespace atc
{

namespace
{

bool same(const Mat3c &a, const Mat3c &b)
{
  return a == b;
}

bool same(cplx a, cplx b)
{
  return a == b;
}

Mat3c inverse(const Mat3c &m)
{
  return m.inverse();
}

cplx inverse(cplx v)
{
  return 1.0 / v;
}

template <class T>
T blend(const T &old, const T &value, double f, Mixing mixing)
{
  if (f >= 1.0)
    return value;
  if (mixing == Mixing::Arithmetic)
    return T((1.0 - f) * old + f * value);
  return inverse(T((1.0 - f) * inverse(old) + f * inverse(value)));
}

// Fraction of the cell around `x` (edge h) inside the shape, from s^3 subcell samples.
template <class Inside>
double cell_fraction(const Vec3 &x, double h, bool planar, int s, Inside &&inside)
{
  int hits = 0, total = 0;
  const int sz = planar ? 1 : s;
  for (int c = 0; c < sz; c++)
    for (int b = 0; b < s; b++)
      for (int a = 0; a < s; a++)
      {
        Vec3 y = x + h * Vec3((a + 0.5) / s - 0.5, (b + 0.5) / s - 0.5,
                              planar ? 0.0 : (c + 0.5) / s - 0.5);
        hits += inside(y) ? 1 : 0;
        total++;
      }
  return double(hits) / total;
}

// Paint using a signed "depth" function (positive inside) and a bound on its
// Lipschitz constant, so cells far from the boundary skip subsampling.
template <class T, class Depth>
void paint(MaterialMap<T> &map, const T &value, Mixing mixing, int s, Depth &&depth)
{
  const Grid &g = map.grid();
  const double h = g.spacing();
  const double reach = (g.planar() ? std::sqrt(2.0) : std::sqrt(3.0)) * 0.5 * h;
  for (std::size_t n = 0; n < g.node_count(); n++)
  {
    Vec3 x = g.position(g.unravel(n));
    double d = depth(x);
    double f;
    if (d >= reach)
      f = 1.0;
    else if (d <= -reach)
      f = 0.0;
    else
      f = cell_fraction(x, h, g.planar(), s, [&](const Vec3 &y) { return depth(y) > 0.0; });
    if (f > 0.0)
      map[n] = blend(map[n], value, f, mixing);
  }
}

}  // namespace

template <class T>
bool MaterialMap<T>::is_background(std::size_t node) const
{
  return same(values_[node], background_);
}

template <class T>
bool MaterialMap<T>::support(Box &out) const
{
  std::vector<bool> mask(values_.size());
  for (std::size_t n = 0; n < values_.size(); n++)
    mask[n] = !is_background(n);
  return bounding_box(grid_, mask, out);
}

template class MaterialMap<Mat3c>;
template class MaterialMap<cplx>;

Mat3c isotropic(cplx value)
{
  return value * Mat3c::Identity();
}

namespace
{

auto ball_depth(const Ball &ball, bool planar)
{
  return [ball, planar](const Vec3 &x) {
    Vec3 d = x - ball.center;
    if (planar)
      d[2] = 0.0;
    return ball.radius - d.norm();
  };
}

auto box_depth(const Vec3 &lo, const Vec3 &hi, bool planar)
{
  return [lo, hi, planar](const Vec3 &x) {
    double d = 1e300;
    for (int a = 0; a < (planar ? 2 : 3); a++)
      d = std::min({d, x[a] - lo[a], hi[a] - x[a]});
    return d;
  };
}

}  // namespace

void paint_ball(TensorMap &map, const Ball &ball, const Mat3c &value, Mixing mixing, int s)
{
  paint(map, value, mixing, s, ball_depth(ball, map.grid().planar()));
}

void paint_ball(ScalarMap &map, const Ball &ball, cplx value, Mixing mixing, int s)
{
  paint(map, value, mixing, s, ball_depth(ball, map.grid().planar()));
}

void paint_box(TensorMap &map, const Vec3 &lo, const Vec3 &hi, const Mat3c &value, Mixing mixing,
               int s)
{
  paint(map, value, mixing, s, box_depth(lo, hi, map.grid().planar()));
}

void paint_box(ScalarMap &map, const Vec3 &lo, const Vec3 &hi, cplx value, Mixing mixing, int s)
{
  paint(map, value, mixing, s, box_depth(lo, hi, map.grid().planar()));
}

void paint_half_space(TensorMap &map, const Vec3 &normal, double offset, const Mat3c &value,
                      Mixing mixing, int s)
{
  if (normal.norm() == 0.0)
    throw InvalidArgument("half-space normal must be nonzero");
  Vec3 n = normal.normalized();
  paint(map, value, mixing, s, [n, offset](const Vec3 &x) { return n.dot(x) - offset; });
}

CellOperator::CellOperator(const TensorMap &tensor, const Box &domain, const Mat3c &subtract,
                           DiagonalRule rule)
  : grid_(tensor.grid()), domain_(domain), weight_(tensor.grid(), Layout::Vector)
{
  require_inside(grid_, Region(domain), "CellOperator");
  const int dim = grid_.dimension();
  const int kc = dim == 3 ? domain.extent(2) - 1 : 1;
  const int corners = dim == 3 ? 8 : 4;
  const double share = dim == 3 ? 0.25 : 0.5;
  cells_.reserve(std::size_t(domain.extent(0) - 1) * (domain.extent(1) - 1) * kc);
  for (int k = 0; k < kc; k++)
    for (int j = 0; j < domain.extent(1) - 1; j++)
      for (int i = 0; i < domain.extent(0) - 1; i++)
      {
        Mat3c s = Mat3c::Zero();
        for (int c = 0; c < corners; c++)
        {
          Index3 n{domain.lo[0] + i + (c & 1), domain.lo[1] + j + ((c >> 1) & 1),
                   domain.lo[2] + k + ((c >> 2) & 1)};
          s += tensor[grid_.index(n)] - subtract;
        }
        cells_.push_back(s / corners);
        if (rule == DiagonalRule::EdgeHarmonic)
          for (int a = 0; a < dim; a++)
          {
            cplx acc = 0.0;
            for (int c = 0; c < corners; c++)
            {
              if ((c >> a) & 1)
                continue;
              Index3 n{domain.lo[0] + i + (c & 1), domain.lo[1] + j + ((c >> 1) & 1),
                       domain.lo[2] + k + ((c >> 2) & 1)};
              Index3 m = n;
              m[a] += 1;
              cplx u = tensor[grid_.index(n)](a, a), v = tensor[grid_.index(m)](a, a);
              acc += std::abs(u + v) > 1e-300 ? 2.0 * u * v / (u + v) : 0.5 * (u + v);
            }
            cells_.back()(a, a) = acc * (2.0 / corners) - subtract(a, a);
          }
        // edge shares
        Index3 base{domain.lo[0] + i, domain.lo[1] + j, domain.lo[2] + k};
        for (int a = 0; a < dim; a++)
          for (int c = 0; c < corners; c++)
          {
            Index3 n = base;
            bool skip = false;
            for (int b = 0; b < dim; b++)
            {
              int on = (c >> b) & 1;
              if (b == a && on)
                skip = true;
              n[b] += on;
            }
            if (!skip)
              weight_(grid_.index(n), a) += share;
          }
      }
}

void CellOperator::apply(const Field &e, Field &out) const
{
  require_layout(e, Layout::Vector, "CellOperator::apply");
  if (!out.compatible(e))
    out = Field(grid_, Layout::Vector);
  std::fill(out.data().begin(), out.data().end(), cplx(0.0));
  const int dim = grid_.dimension();
  const int kc = dim == 3 ? domain_.extent(2) - 1 : 1;
  const int per = dim == 3 ? 4 : 2;
  const double share = 1.0 / per;
  std::size_t cell = 0;
  std::size_t idx[3][4];
  for (int k = 0; k < kc; k++)
    for (int j = 0; j < domain_.extent(1) - 1; j++)
      for (int i = 0; i < domain_.extent(0) - 1; i++, cell++)
      {
        const int i0 = domain_.lo[0] + i, j0 = domain_.lo[1] + j, k0 = domain_.lo[2] + k;
        // edges of each direction in the cell
        for (int s = 0; s < per; s++)
        {
          int p = s & 1, q = (s >> 1) & 1;
          idx[0][s] = grid_.index(i0, j0 + p, k0 + q);
          idx[1][s] = grid_.index(i0 + p, j0, k0 + q);
          if (dim == 3)
            idx[2][s] = grid_.index(i0 + p, j0 + q, k0);
        }
        cplx avg[3];
        for (int a = 0; a < dim; a++)
        {
          avg[a] = 0.0;
          for (int s = 0; s < per; s++)
            avg[a] += e(idx[a][s], a);
          avg[a] *= share;
        }
        const Mat3c &sg = cells_[cell];
        for (int a = 0; a < dim; a++)
        {
          cplx cross_term = 0.0;
          for (int b = 0; b < dim; b++)
            if (b != a)
              cross_term += sg(a, b) * avg[b];
          for (int s = 0; s < per; s++)
            out(idx[a][s], a) += share * (sg(a, a) * e(idx[a][s], a) + cross_term);
        }
      }
}

}  // namespace atc
