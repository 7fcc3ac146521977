#include <catch_amalgamated.hpp>
#include <cmath>
#include <numbers>
#include "atc/calculus.hpp"
#include "atc/integrals.hpp"
#include "atc/projections.hpp"
#include "support.hpp"

using namespace atc;
constexpr double pi = std::numbers::pi;

namespace
{

// Vector field sampled on staggered edges: component a at x + (h/2) e_a.
template <class Fn>
Field staggered(const Grid &g, Fn &&fn)
{
  Field f = Field::vector(g);
  for (std::size_t n = 0; n < g.node_count(); n++)
  {
    Vec3 x = g.position(g.unravel(n));
    for (int a = 0; a < 3; a++)
    {
      Vec3 y = x;
      y[a] += 0.5 * g.spacing();
      f(n, a) = fn(y)[a];
    }
  }
  return f;
}

// Random field of divergence-free edge fields supported inside the box.
Field solenoidal_inside(const Grid &g, const Box &b, std::mt19937_64 &rng)
{
  Field psi = test::random_field(g, Layout::Vector, rng);
  for (std::size_t n = 0; n < g.node_count(); n++)
  {
    Index3 idx = g.unravel(n);
    bool deep = true;
    for (int a = 0; a < 3; a++)
      deep = deep && idx[a] >= b.lo[a] + 1 && idx[a] <= b.hi[a] - 2;
    if (!deep)
      for (int a = 0; a < 3; a++)
        psi(n, a) = 0.0;
  }
  return curl(psi, Diff::Backward);
}

}  // namespace

TEST_CASE("Fourier projection fixes gradients and kills curls", "[projections]")
{
  std::mt19937_64 rng(21);
  Grid g({16, 20, 12}, 0.1);
  Field f = test::random_field(g, Layout::Scalar, rng);
  Field p = grad(f, Diff::Spectral);
  CHECK(test::rel_diff(gamma1_fourier(p), p) < 1e-12);
  Field v = test::random_field(g, Layout::Vector, rng);
  Field c = curl(v, Diff::Spectral);
  CHECK(gamma1_fourier(c).norm() < 1e-12 * c.norm());
}

TEST_CASE("Fourier projection of a single mode", "[projections]")
{
  Grid g({16, 16, 16}, 1.0 / 16);
  Vec3 kv = 2 * pi * Vec3(1, -2, 3);
  Vec3c a(cplx(1, 0.5), cplx(-0.3, 0), cplx(0.2, 2));
  Field p = sample(g, Layout::Vector, [&](const Vec3 &x, cplx *o) {
    cplx ph = std::exp(cplx(0, kv.dot(x)));
    for (int c = 0; c < 3; c++)
      o[c] = a[c] * ph;
  });
  Vec3c ka = kv.cast<cplx>() * (kv[0] * a[0] + kv[1] * a[1] + kv[2] * a[2]) / kv.squaredNorm();
  Field expect = sample(g, Layout::Vector, [&](const Vec3 &x, cplx *o) {
    cplx ph = std::exp(cplx(0, kv.dot(x)));
    for (int c = 0; c < 3; c++)
      o[c] = ka[c] * ph;
  });
  CHECK(test::rel_diff(gamma1_fourier(p), expect) < 1e-12);
}

TEST_CASE("Fourier projection is idempotent and self-adjoint", "[projections]")
{
  std::mt19937_64 rng(22);
  Grid g({24, 24, 24}, 0.05);
  Region all = whole_grid(g);
  for (int t = 0; t < 5; t++)
  {
    Field p = test::random_field(g, Layout::Vector, rng);
    Field q = test::random_field(g, Layout::Vector, rng);
    Field gp = gamma1_fourier(p);
    CHECK(test::rel_diff(gamma1_fourier(gp), gp) < 1e-10);
    cplx lhs = inner_product(gp, q, all), rhs = inner_product(p, gamma1_fourier(q), all);
    double scale = std::sqrt(std::abs(inner_product(p, p, all) * inner_product(q, q, all)));
    CHECK(std::abs(lhs - rhs) < 1e-10 * scale);
  }
}

TEST_CASE("Dirichlet Poisson solver", "[projections]")
{
  SECTION("zero right-hand side")
  {
    Grid g({12, 12, 12}, 0.1);
    Field V = poisson_dirichlet(Field::scalar(g), Box{{1, 1, 1}, {10, 10, 10}});
    CHECK(V.max_abs() == 0.0);
  }
  SECTION("planar sine mode is a discrete eigenfunction")
  {
    const int n = 33;
    const double L = 1.0, h = L / (n - 1);
    Grid g({n, n, 1}, h);
    Field rhs = sample(g, Layout::Scalar, [&](const Vec3 &x, cplx *o) {
      o[0] = -(2 * pi * pi / (L * L)) * 2.0 * std::sin(pi * x[0] / L) * std::sin(pi * x[1] / L);
    });
    Field V = poisson_dirichlet(rhs, whole_grid(g));
    double s = std::sin(pi * h / (2 * L));
    double lambda = -2.0 * 4.0 / (h * h) * s * s;
    double err = 0.0, scale = 0.0;
    for (int j = 1; j < n - 1; j++)
      for (int i = 1; i < n - 1; i++)
      {
        cplx expect = rhs.at(i, j, 0) / lambda;
        err = std::max(err, std::abs(V.at(i, j, 0) - expect));
        scale = std::max(scale, std::abs(expect));
      }
    CHECK(err < 1e-13 * scale);
  }
  SECTION("inverts the discrete Laplacian")
  {
    std::mt19937_64 rng(23);
    Grid g({14, 13, 12}, 0.2);
    Box b{{1, 2, 1}, {12, 11, 10}};
    Field V0 = test::random_field(g, Layout::Scalar, rng);
    for (std::size_t n = 0; n < g.node_count(); n++)
    {
      Index3 idx = g.unravel(n);
      bool interior = true;
      for (int a = 0; a < 3; a++)
        interior = interior && idx[a] > b.lo[a] && idx[a] < b.hi[a];
      if (!interior)
        V0(n, 0) = 0.0;
    }
    Field V = poisson_dirichlet(laplacian(V0), b);
    CHECK(test::rel_diff(V, V0) < 1e-12);
  }
}

TEST_CASE("Dirichlet projection on exact gradients and solenoidal fields", "[projections]")
{
  auto potential = [](const Vec3 &x) {
    return std::sin(pi * x[0]) * std::sin(pi * x[1]) * std::sin(pi * x[2]) * (1.0 + x[0] * x[1]);
  };
  auto gradient = [&](const Vec3 &x) {
    const double d = 1e-6;
    Vec3 gv;
    for (int a = 0; a < 3; a++)
    {
      Vec3 xp = x, xm = x;
      xp[a] += d;
      xm[a] -= d;
      gv[a] = -(potential(xp) - potential(xm)) / (2 * d);
    }
    return gv;
  };
  auto stream = [](const Vec3 &x) {
    double s = std::sin(pi * x[0]) * std::sin(pi * x[1]) * std::sin(pi * x[2]);
    return s * s * (1.0 + x[0] * x[1] + x[2]);
  };
  // curl of (0, 0, stream)
  auto solenoidal = [&](const Vec3 &x) {
    const double d = 1e-6;
    Vec3 dx(d, 0, 0), dy(0, d, 0);
    return Vec3((stream(x + dy) - stream(x - dy)) / (2 * d),
                -(stream(x + dx) - stream(x - dx)) / (2 * d), 0.0);
  };
  double grad_err[2], sol_norm[2];
  for (int r = 0; r < 2; r++)
  {
    int n = r == 0 ? 17 : 33;
    Grid g({n, n, n}, 1.0 / (n - 1));
    Box b = whole_grid(g);
    Field p = staggered(g, gradient);
    Field e = gamma1_dirichlet(p, b);
    // compare on edges inside the box
    Field mask_p = p, mask_e = e;
    for (std::size_t q = 0; q < g.node_count(); q++)
    {
      Index3 idx = g.unravel(q);
      for (int a = 0; a < 3; a++)
        if (idx[a] == n - 1)
          mask_p(q, a) = mask_e(q, a) = 0.0;
    }
    grad_err[r] = test::rel_diff(mask_e, mask_p);
    Field j = staggered(g, solenoidal);
    sol_norm[r] = gamma1_dirichlet(j, b).norm() / j.norm();
  }
  CHECK(grad_err[1] < 5e-3);
  CHECK(grad_err[0] / grad_err[1] > 3.5);
  CHECK(sol_norm[1] < 5e-3);
  CHECK(sol_norm[0] / sol_norm[1] > 3.5);
}

TEST_CASE("Dirichlet projection laws", "[projections]")
{
  std::mt19937_64 rng(24);
  Grid g({20, 18, 16}, 0.1);
  Box b{{2, 2, 2}, {17, 15, 13}};
  DirichletPoisson solver(g, b);
  Region all = whole_grid(g);
  for (int t = 0; t < 5; t++)
  {
    Field p = test::random_field(g, Layout::Vector, rng);
    Field q = test::random_field(g, Layout::Vector, rng);
    Field gp = gamma1_dirichlet(p, solver);
    CHECK(test::rel_diff(gamma1_dirichlet(gp, solver), gp) < 5e-8);
    cplx lhs = inner_product(gp, q, all), rhs = inner_product(p, gamma1_dirichlet(q, solver), all);
    CHECK(std::abs(lhs - rhs) < 1e-10 * p.norm() * q.norm());
    Field j = solenoidal_inside(g, b, rng);
    CHECK(std::abs(inner_product(gp, j, all)) < 1e-9 * gp.norm() * j.norm());
    CHECK(gamma1_dirichlet(j, solver).norm() < 1e-10 * j.norm());
  }
  // nothing leaks outside the box faces
  Field p = test::random_field(g, Layout::Vector, rng);
  Field e = gamma1_dirichlet(p, solver);
  double outside = 0.0;
  for (std::size_t n = 0; n < g.node_count(); n++)
    if (!b.contains(g.unravel(n)))
      for (int a = 0; a < 3; a++)
        outside = std::max(outside, std::abs(e(n, a)));
  CHECK(outside == 0.0);
}
