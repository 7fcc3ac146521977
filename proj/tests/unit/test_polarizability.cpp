#include <catch_amalgamated.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include "atc/calculus.hpp"
#include "atc/errors.hpp"
#include "atc/kernel.hpp"
#include "atc/krylov.hpp"
#include "atc/polarizability.hpp"

using namespace atc;
constexpr double pi = std::numbers::pi;

namespace
{

// 4π ε0 a³ (ε1 - ε0)/(ε1 + 2ε0)
cplx sphere_alpha(double a, cplx e1, double e0)
{
  return 4 * pi * e0 * a * a * a * (e1 - e0) / (e1 + 2 * e0);
}

struct Sphere
{
  Grid grid;
  double a;
  InclusionProblem problem;
};

Sphere sphere(int n, double radius_fraction, cplx eps1, Vec3 shift = Vec3::Zero())
{
  double h = 1.0 / (n - 1);
  Grid g = Grid::centered({n, n, n}, h);
  double a = radius_fraction;
  TensorMap eps(g, isotropic(1.0));
  paint_ball(eps, Ball{shift * h, a}, isotropic(eps1), Mixing::Harmonic);
  InclusionProblem p;
  p.epsilon = eps;
  p.epsilon0 = 1.0;
  p.e0 = Vec3c(0, 0, 1);
  return {g, a, p};
}

}  // namespace

TEST_CASE("lattice Green's function", "[polarizability][kernel]")
{
  auto lap = [](int i, int j, int k) {
    return 6 * lattice_green(i, j, k) - lattice_green(i + 1, j, k) - lattice_green(i - 1, j, k) -
           lattice_green(i, j + 1, k) - lattice_green(i, j - 1, k) - lattice_green(i, j, k + 1) -
           lattice_green(i, j, k - 1);
  };
  CHECK(lattice_green(0, 0, 0) == Catch::Approx(0.252731009858663).epsilon(1e-12));
  CHECK(lap(0, 0, 0) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(lap(3, 1, 0)) <= 1e-13);
  CHECK(std::abs(lap(20, 7, 2)) <= 1e-12);
  // across the switch to the asymptotic form the discrete equation holds to
  // the expansion's O(r^-5) truncation
  CHECK(std::abs(lap(24, 3, 1)) <= 1e-8);
  CHECK(std::abs(lap(30, 2, 2)) <= 1e-8);
  CHECK(lattice_green(40, 0, 0) == Catch::Approx(1 / (4 * pi * 40)).epsilon(2e-3));
  CHECK(lattice_green(-2, 5, -1) == lattice_green(5, 1, 2));
}

TEST_CASE("box convolution matches a direct sum", "[polarizability][kernel]")
{
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Index3 ns{5, 4, 6}, nt{7, 5, 3}, off{-2, 3, 1};
  Convolver conv(ns, nt, off);
  auto K = [](const Index3 &d) { return cplx(1.0 / (1 + d[0] * d[0] + 2 * d[1] * d[1]), d[2]); };
  int id = conv.add_kernel(K);
  std::vector<cplx> src(conv.source_size()), out(conv.target_size());
  for (auto &v : src)
    v = cplx(nd(rng), nd(rng));
  conv.apply(id, src.data(), out.data());
  double err = 0, scale = 0;
  std::size_t t = 0;
  for (int z = 0; z < nt[2]; z++)
    for (int y = 0; y < nt[1]; y++)
      for (int x = 0; x < nt[0]; x++, t++)
      {
        cplx sum = 0;
        std::size_t s = 0;
        for (int c = 0; c < ns[2]; c++)
          for (int b = 0; b < ns[1]; b++)
            for (int a = 0; a < ns[0]; a++, s++)
              sum += K({x + off[0] - a, y + off[1] - b, z + off[2] - c}) * src[s];
        err = std::max(err, std::abs(sum - out[t]));
        scale = std::max(scale, std::abs(sum));
      }
  CHECK(err <= 1e-12 * scale);
}

TEST_CASE("GMRES and Richardson", "[polarizability][krylov]")
{
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  const int n = 120;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(n, n);
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++)
      M(i, j) += cplx(nd(rng), nd(rng)) * 0.3 / std::sqrt(double(n));
  Eigen::VectorXcd b = Eigen::VectorXcd::Random(n);
  LinearOperator A = [&](const Eigen::VectorXcd &x, Eigen::VectorXcd &y) { y = M * x; };
  Eigen::VectorXcd x;
  KrylovOptions o;
  o.tol = 1e-12;
  o.restart = 20;
  KrylovResult r = gmres(A, b, x, o);
  CHECK((M * x - b).norm() <= 1e-11 * b.norm());
  CHECK(r.iterations > 0);
  Eigen::VectorXcd y;
  KrylovResult rr = richardson(A, b, y, o);
  CHECK((M * y - b).norm() <= 1e-11 * b.norm());
  CHECK(rr.contraction() < 1.0);
  // a contraction above one is reported, not looped on
  Eigen::MatrixXcd bad = 3.0 * M;
  LinearOperator B = [&](const Eigen::VectorXcd &v, Eigen::VectorXcd &w) { w = bad * v; };
  Eigen::VectorXcd z;
  o.max_iter = 50;
  CHECK_THROWS_AS(richardson(B, b, z, o), NonConvergence);
}

TEST_CASE("quasistatic sphere", "[polarizability]")
{
  Sphere s = sphere(64, 10.0 / 63, 2.0);
  QuasistaticSolution sol = solve_quasistatic(s.problem);
  Vec3c b = dipole_moment(sol);
  cplx cm = sphere_alpha(s.a, 2.0, 1.0);
  INFO("b_z " << b[2] << " CM " << cm);
  CHECK(std::abs(b[2] - cm) <= 0.02 * std::abs(cm));
  CHECK(std::abs(b[0]) + std::abs(b[1]) <= 1e-10 * std::abs(cm));

  SECTION("interior field is uniform")
  {
    const Grid &loc = sol.local;
    const double h = loc.spacing();
    const cplx expect = 3.0 / (2.0 + 2.0);
    double worst = 0;
    for (std::size_t q = 0; q < loc.node_count(); q++)
    {
      Vec3 x = loc.position(loc.unravel(q)) + Vec3(0, 0, 0.5 * h);
      if (x.norm() < s.a - 2 * h)
        worst = std::max(worst, std::abs(sol.e(q, 2) - expect) / std::abs(expect));
    }
    INFO("worst interior deviation " << worst);
    CHECK(worst <= 0.02);
  }
  SECTION("projection consistency")
  {
    // edges leaving the grid are masked, so check away from the top faces
    Field c = curl(sol.e_s, Diff::Forward);
    Field d = div(sol.d_s, Diff::Backward);
    double worst_c = 0, worst_d = 0;
    for (std::size_t idx : region_nodes(s.grid, Region(interior_box(s.grid, 1))))
    {
      for (int a = 0; a < 3; a++)
        worst_c = std::max(worst_c, std::abs(c(idx, a)));
      worst_d = std::max(worst_d, std::abs(d(idx, 0)));
    }
    const double scale = sol.e_s.max_abs() / s.grid.spacing();
    CHECK(worst_c <= 1e-8 * scale);
    CHECK(worst_d <= 1e-6 * scale);
  }
  SECTION("far-field fit agrees with the volume dipole")
  {
    SphereQuadrature quad = SphereQuadrature::product(12);
    const double r = 2.5 * s.a;
    std::vector<Vec3> pts;
    for (const Vec3 &n : quad.directions)
      pts.push_back(r * n);
    Vec3c beta = farfield_dipole_fit(quad, r, scattered_potential(sol, 1.0, pts), 1.0);
    CHECK((beta - b).norm() <= 0.03 * b.norm());
    // the grid potential carries the same dipole
    std::vector<cplx> grid_vals;
    for (const Vec3 &x : pts)
      grid_vals.push_back(interpolate(sol.phi_s, 0, x));
    Vec3c beta_grid = farfield_dipole_fit(quad, r, grid_vals, 1.0);
    CHECK((beta_grid - b).norm() <= 0.03 * b.norm());
  }
}

TEST_CASE("dipole fit on model data", "[polarizability]")
{
  SphereQuadrature quad = SphereQuadrature::product(10);
  Vec3c p(cplx(1.0, 0.5), -2.0, cplx(0.0, 0.3));
  const double r = 0.7, eps0 = 2.0;
  std::vector<cplx> v, zero(quad.size(), 0.0);
  for (const Vec3 &n : quad.directions)
    v.push_back(n.cast<cplx>().dot(p) / (4 * pi * eps0 * r * r));
  CHECK((farfield_dipole_fit(quad, r, v, eps0) - p).norm() <= 1e-12 * p.norm());
  CHECK(farfield_dipole_fit(quad, r, zero, eps0).norm() == 0.0);
  // equatorial samples cannot see the z component
  SphereQuadrature sparse;
  for (int i = 0; i < 6; i++)
  {
    sparse.directions.push_back(Vec3(std::cos(i * pi / 3), std::sin(i * pi / 3), 0));
    sparse.weights.push_back(4 * pi / 6);
  }
  CHECK_THROWS_AS(farfield_dipole_fit(sparse, r, std::vector<cplx>(sparse.size()), eps0),
                  InvalidArgument);
}

TEST_CASE("free space and invalid inclusions", "[polarizability]")
{
  Grid g = Grid::centered({24, 24, 24}, 0.1);
  InclusionProblem p;
  p.epsilon = TensorMap(g, isotropic(1.0));
  QuasistaticSolution sol = solve_quasistatic(p);
  CHECK(dipole_moment(sol).norm() == 0.0);
  CHECK(sol.e_s.max_abs() == 0.0);
  CHECK(sol.d_s.max_abs() == 0.0);
  CHECK(polarizability_tensor(p).norm() == 0.0);
  // a ball reaching too close to the grid edge
  paint_ball(p.epsilon, Ball{Vec3::Zero(), 0.8}, isotropic(2.0), Mixing::Harmonic);
  CHECK_THROWS_AS(solve_quasistatic(p), InvalidArgument);
  InclusionProblem q;
  q.epsilon = TensorMap(g, isotropic(2.0));
  CHECK_THROWS_AS(solve_quasistatic(q), InvalidArgument);
}

TEST_CASE("refinement and superposition", "[polarizability]")
{
  SECTION("Clausius-Mossotti error decreases with resolution")
  {
    std::vector<double> err;
    for (int n : {32, 48, 64})
    {
      Sphere s = sphere(n, 10.0 / 63, 2.0, Vec3(0.17, -0.31, 0.23));
      QuasistaticOptions o;
      o.full_fields = false;
      cplx b = dipole_moment(solve_quasistatic(s.problem, o))[2];
      cplx cm = sphere_alpha(s.a, 2.0, 1.0);
      err.push_back(std::abs(b - cm) / std::abs(cm));
    }
    INFO("errors " << err[0] << " " << err[1] << " " << err[2]);
    CHECK(err[1] < err[0]);
    CHECK(err[2] < err[1]);
  }
  SECTION("two separated spheres")
  {
    const int n = 72;
    double h = 1.0 / (n - 1);
    Grid g = Grid::centered({n, n, n}, h);
    const double a = 4.5 * h, sep = 0.2;
    auto solve = [&](std::vector<double> centres) {
      InclusionProblem p;
      p.epsilon = TensorMap(g, isotropic(1.0));
      for (double c : centres)
        paint_ball(p.epsilon, Ball{Vec3(c, 0, 0), a}, isotropic(2.0), Mixing::Harmonic);
      p.e0 = Vec3c(1, 0, 0);
      QuasistaticOptions o;
      o.full_fields = false;
      return dipole_moment(solve_quasistatic(p, o))[0];
    };
    cplx pair = solve({-sep / 2, sep / 2});
    cplx single = solve({-sep / 2}) + solve({sep / 2});
    CHECK(std::abs(pair - single) <= 0.05 * std::abs(single));
  }
}

TEST_CASE("polarizability tensor and absorbed power", "[polarizability]")
{
  SECTION("sphere is isotropic")
  {
    Sphere s = sphere(48, 7.0 / 47, 2.0);
    Mat3c alpha = polarizability_tensor(s.problem);
    cplx cm = sphere_alpha(s.a, 2.0, 1.0);
    for (int a = 0; a < 3; a++)
      CHECK(std::abs(alpha(a, a) - cm) <= 0.02 * std::abs(cm));
    Mat3c off = alpha - Mat3c(alpha.diagonal().asDiagonal());
    CHECK(off.norm() <= 0.02 * std::abs(cm));
  }
  SECTION("cube with a real symmetric anisotropic tensor")
  {
    const int n = 40;
    Grid g = Grid::centered({n, n, n}, 1.0 / (n - 1));
    Mat3c e = Mat3c::Zero();
    e << 2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 3.0;
    InclusionProblem p;
    p.epsilon = TensorMap(g, isotropic(1.0));
    paint_box(p.epsilon, Vec3::Constant(-0.1), Vec3::Constant(0.1), e, Mixing::Arithmetic);
    Mat3c alpha = polarizability_tensor(p);
    CHECK(alpha.imag().norm() <= 1e-12 * alpha.norm());
    CHECK((alpha - alpha.transpose()).norm() <= 1e-3 * alpha.norm());
  }
  SECTION("lossy sphere")
  {
    const cplx e1(2.0, 0.5);
    Sphere s = sphere(48, 7.0 / 47, e1);
    s.problem.omega = 3.0;
    s.problem.e0 = Vec3c(cplx(0.6, 0.2), 0.0, 0.8);
    QuasistaticSolution sol = solve_quasistatic(s.problem);
    Vec3c b = dipole_moment(sol);
    cplx be = 0;
    for (int a = 0; a < 3; a++)
      be += b[a] * std::conj(s.problem.e0[a]);
    CHECK(be.imag() > 0);
    Mat3c alpha = polarizability_tensor(s.problem);
    double W = absorbed_power(alpha, s.problem.e0, s.problem.omega);
    double Wv = absorbed_power_volume(sol, s.problem.omega);
    INFO("W " << W << " volume " << Wv);
    CHECK(W > 0);
    CHECK(std::abs(W - Wv) <= 0.03 * W);
    CHECK(absorbed_power(alpha, 2.0 * s.problem.e0, s.problem.omega) ==
          Catch::Approx(4 * W).epsilon(1e-12));
    // passivity of the tensor
    Mat3c loss = (alpha - alpha.adjoint()) / cplx(0.0, 2.0);
    Eigen::SelfAdjointEigenSolver<Mat3c> es(loss);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * alpha.norm());
    PolarizabilityResult res{alpha, b, W};
    nlohmann::json j = to_json(res);
    CHECK(j.contains("alpha_re"));
    CHECK(j.contains("alpha_im"));
    CHECK(j["W"].get<double>() == W);
  }
  SECTION("lossless medium absorbs nothing")
  {
    Sphere s = sphere(32, 4.0 / 31, 2.0);
    Mat3c alpha = polarizability_tensor(s.problem);
    CHECK(std::abs(absorbed_power(alpha, Vec3c(1, 0, 0), 2.0)) <= 1e-10 * alpha.norm());
  }
}
