#pragma once

#include <functional>
#include <memory>
#include <vector>
#include "atc/grid.hpp"
#include "atc/region.hpp"

namespace atc
{

namespace fft
{
class DftPlan;
}

// Free-space lattice Green's function of the 7-point Laplacian at unit
// spacing: -Δ_h g = δ, g → 1/(4π|n|). Exact (to roundoff) for offsets with
// all |n_a| ≤ 24, asymptotic expansion beyond.
double lattice_green(int n1, int n2, int n3);

// Linear (non-periodic) convolution between two boxes of nodes by circulant
// embedding: out(t) = Σ_s K(t + offset - s) src(s), with t and s local node
// indices of the target and source boxes (x fastest) and offset = target.lo - source.lo.
class Convolver
{
public:
  using Kernel = std::function<cplx(const Index3 &delta)>;

  Convolver(const Index3 &source_extent, const Index3 &target_extent, const Index3 &offset);
  ~Convolver();
  Convolver(const Convolver &) = delete;
  Convolver &operator=(const Convolver &) = delete;

  // Sample and transform a kernel; returns its id.
  int add_kernel(const Kernel &k);

  std::size_t source_size() const;
  std::size_t target_size() const;
  std::size_t spectrum_size() const;

  // Spectrum of a source-box array.
  void forward(const cplx *src, std::vector<cplx> &spectrum);
  // acc += scale · K̂_id · spectrum
  void accumulate(int id, const std::vector<cplx> &spectrum, std::vector<cplx> &acc,
                  cplx scale = 1.0) const;
  // Target-box values from an accumulated spectrum (consumes acc).
  void backward(std::vector<cplx> &acc, cplx *out);

  // Single-kernel convenience.
  void apply(int id, const cplx *src, cplx *out);

private:
  Index3 ns_, nt_, off_, m_;
  std::unique_ptr<fft::DftPlan> plan_;
  std::vector<std::vector<cplx>> kernels_;
  std::vector<cplx> work_;
};

// Copy between a grid array and a box array (x fastest).
void gather_box(const Grid &grid, const Box &box, const std::vector<cplx> &grid_values, int ncomp,
                int comp, std::vector<cplx> &box_values);
void scatter_box(const Grid &grid, const Box &box, const std::vector<cplx> &box_values,
                 std::vector<cplx> &grid_values, int ncomp, int comp, bool add = false);

// Outgoing Helmholtz kernel g = e^{ikr}/(4πr) and its derivatives, as used
// for sums h³ Σ K(x_n - x_m) f_m. The singular cell is replaced by the
// integral over a sphere of volume h³ divided by h³.
struct Helmholtz
{
  double k;
  double h;
  double self_radius() const;
  // ∫ g over the volume-equivalent sphere
  cplx self_integral() const;
  cplx g(const Index3 &d) const;
  // ∂_a g
  cplx grad(const Index3 &d, int a) const;
  // ∂_a ∂_b g; the self cell carries δ_ab(-k² I_g - 1)/(3h³)
  cplx hessian(const Index3 &d, int a, int b) const;
};

// Continuous versions at a physical displacement r ≠ 0.
cplx helmholtz_g(double k, const Vec3 &r);
Vec3c helmholtz_grad(double k, const Vec3 &r);
Mat3c helmholtz_hessian(double k, const Vec3 &r);

}  // namespace atc
