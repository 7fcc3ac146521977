#include "atc/integrals.hpp"

#include <string>
#include "atc/calculus.hpp"
#include "atc/errors.hpp"
#include "atc/sphere.hpp"

namespace atc
{

namespace
{

template <class Pair>
cplx region_sum(const Field &f, const Field &g, const Region &region, const char *op, Pair pair)
{
  require_compatible(f, g, op);
  require_inside(f.grid(), region, op);
  cplx s = 0.0;
  const int nc = f.components();
  for (std::size_t n : region_nodes(f.grid(), region))
    for (int c = 0; c < nc; c++)
      s += pair(f(n, c), g(n, c));
  return s * f.grid().cell_measure();
}

}  // namespace

cplx inner_product(const Field &f, const Field &g, const Region &region)
{
  return region_sum(f, g, region, "inner_product",
                    [](cplx a, cplx b) { return a * std::conj(b); });
}

cplx bilinear_integral(const Field &f, const Field &g, const Region &region)
{
  return region_sum(f, g, region, "bilinear_integral", [](cplx a, cplx b) { return a * b; });
}

cplx volume_integral(const Field &f, int component, const Region &region)
{
  require_inside(f.grid(), region, "volume_integral");
  cplx s = 0.0;
  for (std::size_t n : region_nodes(f.grid(), region))
    s += f(n, component);
  return s * f.grid().cell_measure();
}

std::vector<double> shell_radii(double r, double shell_fraction, int count)
{
  if (shell_fraction <= 0.0 || count <= 1)
    return {r};
  std::vector<double> radii;
  for (int q = 0; q < count; q++)
    radii.push_back(r * (1.0 + shell_fraction * (-1.0 + 2.0 * q / (count - 1))));
  return radii;
}

std::vector<cplx> surface_flux(const Field &q, int axis_slot, const Region &region,
                               const SurfaceOptions &opts)
{
  const std::vector<int> &shape = q.shape();
  if (axis_slot < 0 || axis_slot >= int(shape.size()) || shape[axis_slot] != 3)
    throw InvalidArgument("surface_flux: contracted index must have extent 3");
  int inner = 1;
  for (int s = axis_slot + 1; s < int(shape.size()); s++)
    inner *= shape[s];
  const int outer = q.components() / (3 * inner);
  const int nout = outer * inner;
  auto comp = [&](int o, int a, int in) { return (o * 3 + a) * inner + in; };
  const Grid &g = q.grid();
  std::vector<cplx> flux(nout, cplx(0.0));

  if (const Box *b = std::get_if<Box>(&region))
  {
    require_strictly_interior(g, region, 1.0, "surface_integral");
    const double area = g.planar() ? g.spacing() : g.spacing() * g.spacing();
    for (int a = 0; a < g.dimension(); a++)
    {
      Box face = *b;
      for (int side = 0; side < 2; side++)
      {
        int inside = side == 0 ? b->lo[a] : b->hi[a];
        int outside = side == 0 ? inside - 1 : inside + 1;
        double sgn = side == 0 ? -1.0 : 1.0;
        face.lo[a] = face.hi[a] = inside;
        for (int k = face.lo[2]; k <= face.hi[2]; k++)
          for (int j = face.lo[1]; j <= face.hi[1]; j++)
            for (int i = face.lo[0]; i <= face.hi[0]; i++)
            {
              Index3 in{i, j, k}, out = in;
              out[a] = outside;
              std::size_t ni = g.index(in), no = g.index(out);
              for (int o = 0; o < outer; o++)
                for (int t = 0; t < inner; t++)
                {
                  int c = comp(o, a, t);
                  flux[o * inner + t] += sgn * 0.5 * (q(ni, c) + q(no, c)) * area;
                }
            }
      }
    }
    return flux;
  }

  const Ball &ball = std::get<Ball>(region);
  const std::vector<double> radii = shell_radii(ball.radius, opts.shell_fraction, opts.shell_radii);
  Ball outer_ball = ball;
  outer_ball.radius = radii.back();
  require_strictly_interior(g, outer_ball, 1.0, "surface_integral");

  std::vector<Vec3> dirs;
  std::vector<double> w;
  if (g.planar())
  {
    int npts = std::max(64, int(8.0 * radii.back() / g.spacing()));
    npts = std::max(npts, opts.min_points);
    CircleQuadrature cq = CircleQuadrature::uniform(npts);
    dirs = cq.directions;
    w = cq.weights;
  }
  else
  {
    SphereQuadrature sq = SphereQuadrature::for_radius(opts.k0, radii.back(), opts.min_points);
    dirs = sq.directions;
    w = sq.weights;
  }
  for (double r : radii)
  {
    const double jac = g.planar() ? r : r * r;
    for (std::size_t p = 0; p < dirs.size(); p++)
    {
      Vec3 x = ball.center + r * dirs[p];
      if (g.planar())
        x[2] = g.origin()[2];
      for (int o = 0; o < outer; o++)
        for (int t = 0; t < inner; t++)
        {
          cplx s = 0.0;
          for (int a = 0; a < g.dimension(); a++)
            s += interpolate(q, comp(o, a, t), x) * dirs[p][a];
          flux[o * inner + t] += w[p] * jac * s;
        }
    }
  }
  for (auto &f : flux)
    f /= double(radii.size());
  return flux;
}

cplx surface_integral(const Field &v, const Region &region, const SurfaceOptions &opts)
{
  require_layout(v, Layout::Vector, "surface_integral");
  return surface_flux(v, 0, region, opts)[0];
}

}  // namespace atc
