#include "atc/kernel.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include "atc/errors.hpp"
#include "atc/fft.hpp"

namespace atc
{

namespace
{

constexpr double pi = std::numbers::pi;
constexpr int exact_range = 24;

// Coefficients of sqrt(2πx) e^{-x} I_n(x) = Σ a_k x^{-k}.
std::vector<double> bessel_asymptotic(int n, int terms)
{
  std::vector<double> a(terms, 0.0);
  const double mu = 4.0 * n * n;
  a[0] = 1.0;
  for (int k = 1; k < terms; k++)
    a[k] = -a[k - 1] * (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (8.0 * k);
  return a;
}

// g(n) = (1/2) ∫_0^∞ Π_a e^{-x} I_{n_a}(x) dx, split at X: Gauss-Legendre
// panels below, the large-x expansion integrated termwise above.
double lattice_green_exact(int n1, int n2, int n3)
{
  static const double gx[10] = {-0.9739065285171717, -0.8650633666889845, -0.6794095682990244,
                                -0.4333953941292472, -0.1488743389816312, 0.1488743389816312,
                                0.4333953941292472,  0.6794095682990244,  0.8650633666889845,
                                0.9739065285171717};
  static const double gw[10] = {0.0666713443086881, 0.1494513491505806, 0.2190863625159820,
                                0.2692667193099963, 0.2955242247147529, 0.2955242247147529,
                                0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
                                0.0666713443086881};
  const double X = 640.0;
  auto ei = [](int n, double x) { return std::cyl_bessel_i(double(n), x) * std::exp(-x); };
  double s = 0.0;
  const double edges[] = {0, 0.25, 0.5, 1, 2, 4, 8, 16, 32, 64, 128, 256, 384, 512, X};
  for (std::size_t p = 0; p + 1 < std::size(edges); p++)
  {
    double l = edges[p], r = edges[p + 1];
    for (int q = 0; q < 10; q++)
    {
      double x = 0.5 * (l + r) + 0.5 * (r - l) * gx[q];
      s += 0.5 * (r - l) * gw[q] * ei(n1, x) * ei(n2, x) * ei(n3, x);
    }
  }
  const int K = 14;
  auto A = bessel_asymptotic(n1, K), B = bessel_asymptotic(n2, K), C = bessel_asymptotic(n3, K);
  std::vector<double> P(K, 0.0);
  for (int i = 0; i < K; i++)
    for (int j = 0; i + j < K; j++)
      for (int k = 0; i + j + k < K; k++)
        P[i + j + k] += A[i] * B[j] * C[k];
  double tail = 0.0;
  for (int k = 0; k < K; k++)
  {
    double p = k + 1.5;
    tail += P[k] * std::pow(X, 1.0 - p) / (p - 1.0);
  }
  tail *= std::pow(2.0 * pi, -1.5);
  return 0.5 * (s + tail);
}

}  // namespace

double lattice_green(int n1, int n2, int n3)
{
  std::array<int, 3> a{std::abs(n1), std::abs(n2), std::abs(n3)};
  std::sort(a.begin(), a.end());
  if (a[2] <= exact_range)
  {
    static std::mutex mtx;
    static std::map<std::array<int, 3>, double> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(a);
    if (it != cache.end())
      return it->second;
    double v = lattice_green_exact(a[0], a[1], a[2]);
    cache.emplace(a, v);
    return v;
  }
  const double r2 = double(a[0]) * a[0] + double(a[1]) * a[1] + double(a[2]) * a[2];
  const double r = std::sqrt(r2);
  const double c4 = (std::pow(a[0], 4) + std::pow(a[1], 4) + std::pow(a[2], 4)) / (r2 * r2);
  return 1.0 / (4 * pi * r) + (5 * c4 - 3) / (32 * pi * r * r2);
}

Convolver::Convolver(const Index3 &source_extent, const Index3 &target_extent,
                     const Index3 &offset)
  : ns_(source_extent), nt_(target_extent), off_(offset)
{
  for (int a = 0; a < 3; a++)
  {
    if (ns_[a] < 1 || nt_[a] < 1)
      throw InvalidArgument("Convolver: empty box");
    m_[a] = fft::good_size(ns_[a] + nt_[a] - 1);
  }
  plan_ = std::make_unique<fft::DftPlan>(std::vector<int>{m_[2], m_[1], m_[0]});
}

Convolver::~Convolver() = default;

std::size_t Convolver::source_size() const
{
  return std::size_t(ns_[0]) * ns_[1] * ns_[2];
}

std::size_t Convolver::target_size() const
{
  return std::size_t(nt_[0]) * nt_[1] * nt_[2];
}

std::size_t Convolver::spectrum_size() const
{
  return plan_->size();
}

int Convolver::add_kernel(const Kernel &k)
{
  cplx *buf = plan_->data();
  // wrapped index j -> kernel offset, or a sentinel when unused
  std::array<std::vector<int>, 3> map;
  std::array<std::vector<char>, 3> used;
  for (int a = 0; a < 3; a++)
  {
    map[a].assign(m_[a], 0);
    used[a].assign(m_[a], 0);
    for (int j = 0; j < nt_[a]; j++)
      map[a][j] = j + off_[a], used[a][j] = 1;
    for (int j = m_[a] - (ns_[a] - 1); j < m_[a]; j++)
      map[a][j] = j - m_[a] + off_[a], used[a][j] = 1;
  }
  std::size_t idx = 0;
  for (int z = 0; z < m_[2]; z++)
    for (int y = 0; y < m_[1]; y++)
      for (int x = 0; x < m_[0]; x++, idx++)
        buf[idx] = used[0][x] && used[1][y] && used[2][z]
                       ? k(Index3{map[0][x], map[1][y], map[2][z]})
                       : cplx(0.0);
  plan_->forward();
  kernels_.emplace_back(buf, buf + plan_->size());
  return int(kernels_.size()) - 1;
}

void Convolver::forward(const cplx *src, std::vector<cplx> &spectrum)
{
  cplx *buf = plan_->data();
  std::fill(buf, buf + plan_->size(), cplx(0.0));
  std::size_t s = 0;
  for (int z = 0; z < ns_[2]; z++)
    for (int y = 0; y < ns_[1]; y++)
    {
      cplx *row = buf + (std::size_t(z) * m_[1] + y) * m_[0];
      for (int x = 0; x < ns_[0]; x++)
        row[x] = src[s++];
    }
  plan_->forward();
  spectrum.assign(buf, buf + plan_->size());
}

void Convolver::accumulate(int id, const std::vector<cplx> &spectrum, std::vector<cplx> &acc,
                           cplx scale) const
{
  const std::vector<cplx> &K = kernels_.at(id);
  if (acc.size() != K.size())
    acc.assign(K.size(), cplx(0.0));
  if (scale == 1.0)
    for (std::size_t i = 0; i < K.size(); i++)
      acc[i] += K[i] * spectrum[i];
  else
    for (std::size_t i = 0; i < K.size(); i++)
      acc[i] += scale * K[i] * spectrum[i];
}

void Convolver::backward(std::vector<cplx> &acc, cplx *out)
{
  cplx *buf = plan_->data();
  std::copy(acc.begin(), acc.end(), buf);
  plan_->backward();
  const double norm = 1.0 / double(plan_->size());
  std::size_t t = 0;
  for (int z = 0; z < nt_[2]; z++)
    for (int y = 0; y < nt_[1]; y++)
    {
      const cplx *row = buf + (std::size_t(z) * m_[1] + y) * m_[0];
      for (int x = 0; x < nt_[0]; x++)
        out[t++] = row[x] * norm;
    }
}

void Convolver::apply(int id, const cplx *src, cplx *out)
{
  std::vector<cplx> spec, acc;
  forward(src, spec);
  accumulate(id, spec, acc);
  backward(acc, out);
}

void gather_box(const Grid &grid, const Box &box, const std::vector<cplx> &grid_values, int ncomp,
                int comp, std::vector<cplx> &box_values)
{
  box_values.resize(box.node_count());
  std::size_t b = 0;
  for (int k = box.lo[2]; k <= box.hi[2]; k++)
    for (int j = box.lo[1]; j <= box.hi[1]; j++)
      for (int i = box.lo[0]; i <= box.hi[0]; i++)
        box_values[b++] = grid_values[grid.index(i, j, k) * ncomp + comp];
}

void scatter_box(const Grid &grid, const Box &box, const std::vector<cplx> &box_values,
                 std::vector<cplx> &grid_values, int ncomp, int comp, bool add)
{
  std::size_t b = 0;
  for (int k = box.lo[2]; k <= box.hi[2]; k++)
    for (int j = box.lo[1]; j <= box.hi[1]; j++)
      for (int i = box.lo[0]; i <= box.hi[0]; i++)
      {
        cplx &v = grid_values[grid.index(i, j, k) * ncomp + comp];
        v = add ? v + box_values[b] : box_values[b];
        b++;
      }
}

double Helmholtz::self_radius() const
{
  return h * std::cbrt(3.0 / (4.0 * pi));
}

cplx Helmholtz::self_integral() const
{
  const double R = self_radius();
  const cplx i(0.0, 1.0);
  if (k * R < 1e-4)
    return 0.5 * R * R + i * k * R * R * R / 3.0;
  return ((1.0 - i * k * R) * std::exp(i * k * R) - 1.0) / (k * k);
}

cplx Helmholtz::g(const Index3 &d) const
{
  if (d[0] == 0 && d[1] == 0 && d[2] == 0)
    return self_integral() / (h * h * h);
  return helmholtz_g(k, Vec3(d[0], d[1], d[2]) * h);
}

cplx Helmholtz::grad(const Index3 &d, int a) const
{
  if (d[0] == 0 && d[1] == 0 && d[2] == 0)
    return 0.0;
  return helmholtz_grad(k, Vec3(d[0], d[1], d[2]) * h)[a];
}

cplx Helmholtz::hessian(const Index3 &d, int a, int b) const
{
  if (d[0] == 0 && d[1] == 0 && d[2] == 0)
    return a == b ? (-k * k * self_integral() - 1.0) / (3.0 * h * h * h) : cplx(0.0);
  return helmholtz_hessian(k, Vec3(d[0], d[1], d[2]) * h)(a, b);
}

cplx helmholtz_g(double k, const Vec3 &r)
{
  double R = r.norm();
  return std::exp(cplx(0.0, k * R)) / (4 * pi * R);
}

Vec3c helmholtz_grad(double k, const Vec3 &r)
{
  double R = r.norm();
  cplx g = std::exp(cplx(0.0, k * R)) / (4 * pi * R);
  cplx f = g * (cplx(0.0, k) - 1.0 / R) / R;
  return (r * f).eval();
}

Mat3c helmholtz_hessian(double k, const Vec3 &r)
{
  double R = r.norm();
  Vec3 n = r / R;
  cplx ikr(0.0, k * R);
  cplx g = std::exp(ikr) / (4 * pi * R);
  cplx radial = g * (3.0 - 3.0 * ikr - k * k * R * R) / (R * R);
  cplx iso = -g * (1.0 - ikr) / (R * R);
  return radial * (n * n.transpose()).cast<cplx>() + iso * Mat3c::Identity();
}

}  // namespace atc
