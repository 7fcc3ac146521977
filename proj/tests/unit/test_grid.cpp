#include <catch_amalgamated.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include "atc/calculus.hpp"
#include "atc/errors.hpp"
#include "atc/field_io.hpp"
#include "atc/integrals.hpp"
#include "support.hpp"

using namespace atc;
using Catch::Approx;
constexpr double pi = std::numbers::pi;

namespace
{

// Nodes at cell centers of [-1, 1]^3 with n cells per axis.
Grid cell_centered(int n)
{
  double h = 2.0 / n;
  return Grid({n, n, n}, h, Vec3::Constant(-1.0 + 0.5 * h));
}

// Box whose control volume is exactly [-half, half]^3 on a cell-centered grid.
Box centered_box(const Grid &g, double half)
{
  int n = g.dim(0);
  int lo = int(std::lround((1.0 - half) / g.spacing()));
  int hi = n - 1 - lo;
  return Box{{lo, lo, lo}, {hi, hi, hi}};
}

}  // namespace

TEST_CASE("grid validates its descriptor", "[grid]")
{
  CHECK_THROWS_AS(Grid({8, 8, 8}, -0.1), InvalidArgument);
  CHECK_THROWS_AS(Grid({8, 8, 8}, 0.0), InvalidArgument);
  CHECK_THROWS_AS(Grid({8, 3, 8}, 0.1), InvalidArgument);
  CHECK_NOTHROW(Grid({8, 8, 1}, 0.1));
  Grid g({5, 6, 7}, 0.25, Vec3(1.0, -2.0, 0.5));
  CHECK(g.node_count() == 210u);
  Vec3 x = g.position(3, 4, 5);
  CHECK(x[0] == 1.0 + 3 * 0.25);
  CHECK(x[1] == -2.0 + 4 * 0.25);
  CHECK(x[2] == 0.5 + 5 * 0.25);
  for (std::size_t n : {0ul, 17ul, 209ul})
    CHECK(g.index(g.unravel(n)) == n);
}

TEST_CASE("fields reject mismatched layouts", "[grid]")
{
  Grid g({8, 8, 8}, 0.1);
  Field s = Field::scalar(g), v = Field::vector(g);
  CHECK(v.size() == g.node_count() * 3);
  CHECK_THROWS_AS(inner_product(s, v, whole_grid(g)), InvalidArgument);
  CHECK_THROWS_AS(div(s, Diff::Central), InvalidArgument);
  Field b(g, Layout::AcousticBlock);
  CHECK(b.components() == 4);
  CHECK(Field(g, Layout::EmBlock).components() == 6);
  CHECK_THROWS_AS(s + v, InvalidArgument);
  CHECK_THROWS_AS(inner_product(s, s, Box{{0, 0, 0}, {8, 7, 7}}), InvalidArgument);
}

TEST_CASE("inner product basics", "[grid]")
{
  SECTION("constant field on a unit-volume box")
  {
    Grid g({12, 12, 12}, 0.1);
    Field one = Field::scalar(g);
    for (auto &v : one.data())
      v = 1.0;
    Box b{{1, 1, 1}, {10, 10, 10}};
    CHECK(std::abs(inner_product(one, one, b) - 1.0) < 1e-12);
  }
  SECTION("distinct Fourier modes are orthogonal")
  {
    Grid g({16, 16, 16}, 1.0 / 16);
    auto mode = [&](int a, int b, int c) {
      return sample(g, Layout::Scalar, [&](const Vec3 &x, cplx *out) {
        out[0] = std::exp(cplx(0, 2 * pi * (a * x[0] + b * x[1] + c * x[2])));
      });
    };
    Field f = mode(1, 2, 0), h = mode(-3, 0, 5);
    double scale = std::abs(inner_product(f, f, whole_grid(g)));
    CHECK(std::abs(inner_product(f, h, whole_grid(g))) < 1e-12 * scale);
  }
  SECTION("self inner product is real and non-negative")
  {
    std::mt19937_64 rng(7);
    Grid g({10, 9, 8}, 0.3);
    for (int t = 0; t < 5; t++)
    {
      Field f = test::random_field(g, Layout::Vector, rng);
      cplx s = inner_product(f, f, Ball{g.position(5, 4, 4), 0.9});
      CHECK(s.real() >= 0.0);
      CHECK(std::abs(s.imag()) <= 1e-14 * s.real());
    }
  }
  SECTION("conjugate-linear in the second argument")
  {
    std::mt19937_64 rng(8);
    Grid g({8, 8, 8}, 0.5);
    Field f = test::random_field(g, Layout::Vector, rng);
    Field h = test::random_field(g, Layout::Vector, rng);
    cplx a(0.3, -1.2);
    cplx lhs = inner_product(f, a * h, whole_grid(g));
    cplx rhs = std::conj(a) * inner_product(f, h, whole_grid(g));
    CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(rhs));
  }
}

TEST_CASE("finite differences are exact on low-order polynomials", "[grid][calculus]")
{
  Grid g({9, 10, 11}, 0.2, Vec3(-0.7, 0.1, 0.3));
  Vec3 a(1.5, -0.25, 2.0);
  Field lin = sample(g, Layout::Scalar, [&](const Vec3 &x, cplx *o) { o[0] = a.dot(x) + 3.0; });
  Field gl = grad(lin, Diff::Central);
  double err = 0.0;
  for (std::size_t n = 0; n < g.node_count(); n++)
    for (int c = 0; c < 3; c++)
      err = std::max(err, std::abs(gl(n, c) - a[c]));
  CHECK(err < 1e-12);

  Field quad = sample(g, Layout::Scalar, [&](const Vec3 &x, cplx *o) {
    o[0] = x[0] * x[0] - 2.0 * x[1] * x[2] + 0.5 * x[2] * x[2];
  });
  Field gq = grad(quad, Diff::Central);
  double qerr = 0.0;
  for (int k = 0; k < g.dim(2); k++)
    for (int j = 0; j < g.dim(1); j++)
      for (int i = 0; i < g.dim(0); i++)
      {
        Vec3 x = g.position(i, j, k);
        Vec3 exact(2 * x[0], -2 * x[2], -2 * x[1] + x[2]);
        for (int c = 0; c < 3; c++)
          qerr = std::max(qerr, std::abs(gq.at(i, j, k, c) - exact[c]));
      }
  // the one-sided boundary stencils are second order too, so quadratics are exact everywhere
  CHECK(qerr < 1e-11);
}

TEST_CASE("spectral vector identities", "[grid][calculus]")
{
  std::mt19937_64 rng(11);
  Grid g({16, 12, 10}, 0.37);
  Field v = test::random_field(g, Layout::Vector, rng);
  Field f = test::random_field(g, Layout::Scalar, rng);
  Field dc = div(curl(v, Diff::Spectral), Diff::Spectral);
  CHECK(dc.norm() <= 1e-12 * curl(v, Diff::Spectral).norm() / g.spacing());
  Field cg = curl(grad(f, Diff::Spectral), Diff::Spectral);
  CHECK(cg.norm() <= 1e-12 * grad(f, Diff::Spectral).norm() / g.spacing());

  // staggered pairs obey the same identities exactly
  Field db = div(curl(v, Diff::Backward), Diff::Backward);
  CHECK(db.norm() <= 1e-12 * v.norm() / (g.spacing() * g.spacing()));
  Field cf = curl(grad(f, Diff::Forward), Diff::Forward);
  CHECK(cf.norm() <= 1e-12 * f.norm() / (g.spacing() * g.spacing()));
}

TEST_CASE("gradient and divergence are adjoint", "[grid][calculus]")
{
  std::mt19937_64 rng(12);
  Grid g({12, 14, 16}, 0.1);
  Region all = whole_grid(g);
  for (int t = 0; t < 5; t++)
  {
    Field f = test::random_field(g, Layout::Scalar, rng);
    Field v = test::random_field(g, Layout::Vector, rng);
    cplx a = inner_product(grad(f, Diff::Spectral), v, all);
    cplx b = inner_product(f, div(v, Diff::Spectral), all);
    CHECK(std::abs(a + b) <= 1e-10 * std::abs(a));
    cplx c = inner_product(grad(f, Diff::Forward), v, all);
    cplx d = inner_product(f, div(v, Diff::Backward), all);
    CHECK(std::abs(c + d) <= 1e-10 * std::abs(c));
  }
}

TEST_CASE("surface integrals", "[grid][integrals]")
{
  SECTION("constant field through a closed box")
  {
    Grid g({10, 10, 10}, 0.1);
    Field v = sample(g, Layout::Vector, [](const Vec3 &, cplx *o) {
      o[0] = cplx(1.0, 2.0);
      o[1] = -3.0;
      o[2] = 0.5;
    });
    CHECK(std::abs(surface_integral(v, Box{{2, 2, 2}, {7, 6, 5}})) < 1e-10);
    CHECK_THROWS_AS(surface_integral(v, Box{{0, 2, 2}, {7, 6, 5}}), InvalidArgument);
  }
  SECTION("position field through a sphere")
  {
    double errs[2];
    for (int r = 0; r < 2; r++)
    {
      int n = r == 0 ? 24 : 48;
      Grid g = cell_centered(n);
      Field v = sample(g, Layout::Vector, [](const Vec3 &x, cplx *o) {
        for (int a = 0; a < 3; a++)
          o[a] = x[a];
      });
      double R = 0.6;
      errs[r] = std::abs(surface_integral(v, Ball{Vec3::Zero(), R}) - 4.0 * pi * R * R * R);
    }
    // trilinear interpolation reproduces linear fields, so only quadrature error remains
    CHECK(errs[1] < 1e-10);
  }
  SECTION("Gauss law for a point source")
  {
    Grid g = Grid::centered({64, 64, 64}, 2.0 / 63);
    Field v = sample(g, Layout::Vector, [](const Vec3 &x, cplx *o) {
      double r = x.norm();
      for (int a = 0; a < 3; a++)
        o[a] = r > 1e-12 ? -x[a] / (r * r * r) : 0.0;
    });
    cplx flux = surface_integral(v, Ball{Vec3::Zero(), 0.5});
    CHECK(std::abs(flux + 4.0 * pi) < 0.02 * 4.0 * pi);
  }
  SECTION("discrete divergence theorem on a box is exact")
  {
    std::mt19937_64 rng(3);
    Grid g({12, 11, 10}, 0.2);
    Field v = test::random_field(g, Layout::Vector, rng);
    Box b{{2, 3, 1}, {9, 8, 8}};
    cplx vol = volume_integral(div(v, Diff::Central), 0, b);
    cplx sur = surface_integral(v, b);
    CHECK(std::abs(vol - sur) < 1e-12 * v.norm());
  }
  SECTION("surface and volume integrals converge together at second order")
  {
    auto field = [](const Vec3 &x, cplx *o) {
      o[0] = std::sin(2.0 * x[0]) * std::cos(x[1]);
      o[1] = std::exp(0.5 * x[2]) * x[1];
      o[2] = std::cos(x[0] + 2.0 * x[2]);
    };
    auto divergence = [](const Vec3 &x, cplx *o) {
      o[0] = 2.0 * std::cos(2.0 * x[0]) * std::cos(x[1]) + std::exp(0.5 * x[2]) -
             2.0 * std::sin(x[0] + 2.0 * x[2]);
    };
    double gap[2];
    for (int r = 0; r < 2; r++)
    {
      Grid g = cell_centered(r == 0 ? 20 : 40);
      Box b = centered_box(g, 0.6);
      Field v = sample(g, Layout::Vector, field);
      Field d = sample(g, Layout::Scalar, divergence);
      gap[r] = std::abs(surface_integral(v, b) - volume_integral(d, 0, b));
    }
    CHECK(gap[0] / gap[1] >= 3.5);
  }
}

TEST_CASE("field container round trip", "[grid][io]")
{
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "atc_io_test";
  fs::create_directories(dir);
  std::mt19937_64 rng(5);
  Grid g({6, 5, 4}, 0.125, Vec3(0.5, -1.0, 2.0));
  Field f = test::random_field(g, Layout::Tensor, rng, {2, 3});

  write_field((dir / "f128.bin").string(), f, Precision::Complex128);
  Field back = read_field((dir / "f128.bin").string());
  CHECK(back.grid() == g);
  CHECK(back.layout() == Layout::Tensor);
  CHECK(back.shape() == f.shape());
  CHECK(back.data() == f.data());

  write_field((dir / "f64.bin").string(), f);
  Field single = read_field((dir / "f64.bin").string());
  CHECK(test::rel_diff(single, f) < 1e-6);
  CHECK(fs::file_size(dir / "f64.bin") < fs::file_size(dir / "f128.bin"));
  CHECK(!fs::exists(dir / "f64.bin.tmp"));

  write_slice_csv((dir / "slice.csv").string(), f, 2, 1);
  std::ifstream in(dir / "slice.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("i,j,x,y,z,re0,im0", 0) == 0);
  int rows = 0;
  for (std::string line; std::getline(in, line);)
    rows++;
  CHECK(rows == 30);
  CHECK_THROWS_AS(read_field((dir / "slice.csv").string()), IoError);
  fs::remove_all(dir);
}
