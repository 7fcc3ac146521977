#include "atc/calculus.hpp"

#include <cmath>
#include <numbers>
#include "atc/errors.hpp"
#include "atc/fft.hpp"

namespace atc
{

double spectral_wavenumber(int m, int n, double spacing)
{
  if (n % 2 == 0 && m == n / 2)
    return 0.0;
  int s = m <= n / 2 ? m : m - n;
  return 2.0 * std::numbers::pi * s / (n * spacing);
}

namespace
{

std::vector<int> fft_extents(const Grid &g)
{
  if (g.planar())
    return {g.dim(1), g.dim(0)};
  return {g.dim(2), g.dim(1), g.dim(0)};
}

std::vector<cplx> spectral_partial(const Grid &g, const std::vector<cplx> &f, int axis)
{
  fft::DftPlan plan(fft_extents(g));
  std::copy(f.begin(), f.end(), plan.data());
  plan.forward();
  const int n = g.dim(axis);
  const double scale = 1.0 / double(g.node_count());
  for (int k = 0; k < g.dim(2); k++)
    for (int j = 0; j < g.dim(1); j++)
      for (int i = 0; i < g.dim(0); i++)
      {
        int m = axis == 0 ? i : axis == 1 ? j : k;
        double kk = spectral_wavenumber(m, n, g.spacing());
        plan.data()[g.index(i, j, k)] *= cplx(0.0, kk * scale);
      }
  plan.backward();
  return std::vector<cplx>(plan.data(), plan.data() + f.size());
}

}  // namespace

std::vector<cplx> partial(const Grid &g, const std::vector<cplx> &f, int axis, Diff mode)
{
  if (f.size() != g.node_count())
    throw InvalidArgument("partial: array length does not match grid");
  std::vector<cplx> out(f.size(), cplx(0.0));
  if (axis == 2 && g.planar())
    return out;
  if (mode == Diff::Spectral)
    return spectral_partial(g, f, axis);

  const int n = g.dim(axis);
  const double h = g.spacing();
  const std::size_t stride = axis == 0 ? 1 : axis == 1 ? std::size_t(g.dim(0))
                                                       : std::size_t(g.dim(0)) * g.dim(1);
  for (int k = 0; k < g.dim(2); k++)
    for (int j = 0; j < g.dim(1); j++)
      for (int i = 0; i < g.dim(0); i++)
      {
        int m = axis == 0 ? i : axis == 1 ? j : k;
        if (m != 0)
          continue;
        // walk one grid line along `axis`
        const std::size_t base = g.index(i, j, k);
        auto F = [&](int q) { return f[base + q * stride]; };
        for (int q = 0; q < n; q++)
        {
          cplx d;
          switch (mode)
          {
            case Diff::Central:
              if (q == 0)
                d = (-3.0 * F(0) + 4.0 * F(1) - F(2)) / (2.0 * h);
              else if (q == n - 1)
                d = (3.0 * F(n - 1) - 4.0 * F(n - 2) + F(n - 3)) / (2.0 * h);
              else
                d = (F(q + 1) - F(q - 1)) / (2.0 * h);
              break;
            case Diff::Forward:
              d = ((q + 1 < n ? F(q + 1) : cplx(0.0)) - F(q)) / h;
              break;
            case Diff::Backward:
              d = (F(q) - (q > 0 ? F(q - 1) : cplx(0.0))) / h;
              break;
            default:
              break;
          }
          out[base + q * stride] = d;
        }
      }
  return out;
}

Field grad(const Field &f, Diff mode)
{
  require_layout(f, Layout::Scalar, "grad");
  Field g = Field::vector(f.grid());
  std::vector<cplx> v = f.component(0);
  for (int a = 0; a < 3; a++)
    g.set_component(a, partial(f.grid(), v, a, mode));
  return g;
}

Field div(const Field &v, Diff mode)
{
  require_layout(v, Layout::Vector, "div");
  Field d = Field::scalar(v.grid());
  for (int a = 0; a < 3; a++)
  {
    std::vector<cplx> p = partial(v.grid(), v.component(a), a, mode);
    for (std::size_t n = 0; n < p.size(); n++)
      d(n, 0) += p[n];
  }
  return d;
}

Field curl(const Field &v, Diff mode)
{
  require_layout(v, Layout::Vector, "curl");
  const Grid &g = v.grid();
  Field c = Field::vector(g);
  std::vector<cplx> vx = v.component(0), vy = v.component(1), vz = v.component(2);
  auto acc = [&](int comp, const std::vector<cplx> &p, double sgn) {
    for (std::size_t n = 0; n < p.size(); n++)
      c(n, comp) += sgn * p[n];
  };
  acc(0, partial(g, vz, 1, mode), 1.0);
  acc(0, partial(g, vy, 2, mode), -1.0);
  acc(1, partial(g, vx, 2, mode), 1.0);
  acc(1, partial(g, vz, 0, mode), -1.0);
  acc(2, partial(g, vy, 0, mode), 1.0);
  acc(2, partial(g, vx, 1, mode), -1.0);
  return c;
}

Field tensor_div(const Field &q, int axis_slot, Diff mode)
{
  const std::vector<int> &shape = q.shape();
  if (axis_slot < 0 || axis_slot >= int(shape.size()) || shape[axis_slot] != 3)
    throw InvalidArgument("tensor_div: contracted index must have extent 3");
  std::vector<int> out_shape;
  for (int s = 0; s < int(shape.size()); s++)
    if (s != axis_slot)
      out_shape.push_back(shape[s]);
  Field out = out_shape.empty() ? Field::scalar(q.grid())
              : out_shape.size() == 1 && out_shape[0] == 3 && q.layout() != Layout::Tensor
                ? Field::vector(q.grid())
                : Field::tensor(q.grid(), out_shape);
  // strides of the input multi-index
  int inner = 1;
  for (int s = axis_slot + 1; s < int(shape.size()); s++)
    inner *= shape[s];
  int outer = q.components() / (3 * inner);
  for (int o = 0; o < outer; o++)
    for (int in = 0; in < inner; in++)
    {
      int oc = o * inner + in;
      for (int a = 0; a < 3; a++)
      {
        int qc = (o * 3 + a) * inner + in;
        std::vector<cplx> p = partial(q.grid(), q.component(qc), a, mode);
        for (std::size_t n = 0; n < p.size(); n++)
          out(n, oc) += p[n];
      }
    }
  return out;
}

Field tensor_grad(const Field &f, Diff mode)
{
  std::vector<int> shape = f.shape();
  shape.push_back(3);
  Field out = Field::tensor(f.grid(), shape);
  for (int c = 0; c < f.components(); c++)
  {
    std::vector<cplx> v = f.component(c);
    for (int a = 0; a < 3; a++)
      out.set_component(c * 3 + a, partial(f.grid(), v, a, mode));
  }
  return out;
}

Field laplacian(const Field &f)
{
  Field out(f.grid(), f.layout(), f.shape());
  for (int c = 0; c < f.components(); c++)
  {
    std::vector<cplx> v = f.component(c);
    std::vector<cplx> acc(v.size(), cplx(0.0));
    for (int a = 0; a < f.grid().dimension(); a++)
    {
      std::vector<cplx> d =
        partial(f.grid(), partial(f.grid(), v, a, Diff::Forward), a, Diff::Backward);
      for (std::size_t n = 0; n < v.size(); n++)
        acc[n] += d[n];
    }
    out.set_component(c, acc);
  }
  return out;
}

cplx interpolate(const Field &f, int component, const Vec3 &x)
{
  const Grid &g = f.grid();
  Vec3 s = g.to_index_space(x);
  int base[3];
  double t[3];
  for (int a = 0; a < 3; a++)
  {
    if (a == 2 && g.planar())
    {
      base[a] = 0;
      t[a] = 0.0;
      continue;
    }
    double fl = std::floor(s[a]);
    base[a] = int(fl);
    t[a] = s[a] - fl;
    if (base[a] == g.dim(a) - 1 && t[a] == 0.0)
    {
      base[a] -= 1;
      t[a] = 1.0;
    }
    if (base[a] < 0 || base[a] + 1 >= g.dim(a))
      throw InvalidArgument("interpolate: point outside grid");
  }
  const int nz = g.planar() ? 1 : 2;
  cplx v = 0.0;
  for (int dz = 0; dz < nz; dz++)
    for (int dy = 0; dy < 2; dy++)
      for (int dx = 0; dx < 2; dx++)
      {
        double w = (dx ? t[0] : 1.0 - t[0]) * (dy ? t[1] : 1.0 - t[1]) *
                   (g.planar() ? 1.0 : (dz ? t[2] : 1.0 - t[2]));
        v += w * f.at(base[0] + dx, base[1] + dy, base[2] + dz, component);
      }
  return v;
}

}  // namespace atc
