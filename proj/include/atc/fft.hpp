#pragma once

#include <vector>
#include "atc/grid.hpp"

namespace atc::fft
{

// Thread count handed to FFTW when plans are created. Results are bitwise
// reproducible for a fixed count.
void set_threads(int n);
int threads();

// In-place complex transform over a row-major array (slowest extent first).
// Unnormalized in both directions.
class DftPlan
{
public:
  explicit DftPlan(std::vector<int> extents);
  ~DftPlan();
  DftPlan(const DftPlan &) = delete;
  DftPlan &operator=(const DftPlan &) = delete;

  cplx *data() { return buf_; }
  const cplx *data() const { return buf_; }
  std::size_t size() const { return n_; }
  const std::vector<int> &extents() const { return extents_; }

  void forward();   // exp(-i k x)
  void backward();  // exp(+i k x)

private:
  std::vector<int> extents_;
  std::size_t n_ = 0;
  cplx *buf_ = nullptr;
  void *fwd_ = nullptr;
  void *bwd_ = nullptr;
};

// In-place type-I discrete sine transform along every axis of a real
// row-major array. Applying it twice multiplies by prod 2(n+1).
class Dst1Plan
{
public:
  explicit Dst1Plan(std::vector<int> extents);
  ~Dst1Plan();
  Dst1Plan(const Dst1Plan &) = delete;
  Dst1Plan &operator=(const Dst1Plan &) = delete;

  double *data() { return buf_; }
  std::size_t size() const { return n_; }
  void execute();

private:
  std::vector<int> extents_;
  std::size_t n_ = 0;
  double *buf_ = nullptr;
  void *plan_ = nullptr;
};

// Smallest integer >= n whose prime factors are 2, 3 and 5.
int good_size(int n);

}  // namespace atc::fft
