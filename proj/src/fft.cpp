#include "atc/fft.hpp"

#include <fftw3.h>
#include <mutex>
#include <new>
#include "atc/errors.hpp"

namespace atc::fft
{

namespace
{

std::mutex plan_mutex;
int thread_count = 1;
bool threads_initialized = false;

void prepare_planner()
{
  if (!threads_initialized)
  {
    fftw_init_threads();
    threads_initialized = true;
  }
  fftw_plan_with_nthreads(thread_count);
}

std::size_t product(const std::vector<int> &e)
{
  std::size_t n = 1;
  for (int v : e)
  {
    if (v <= 0)
      throw InvalidArgument("transform extents must be positive");
    n *= std::size_t(v);
  }
  return n;
}

}  // namespace

void set_threads(int n)
{
  std::lock_guard<std::mutex> lock(plan_mutex);
  thread_count = n < 1 ? 1 : n;
}

int threads()
{
  std::lock_guard<std::mutex> lock(plan_mutex);
  return thread_count;
}

DftPlan::DftPlan(std::vector<int> extents) : extents_(std::move(extents))
{
  n_ = product(extents_);
  std::lock_guard<std::mutex> lock(plan_mutex);
  prepare_planner();
  buf_ = reinterpret_cast<cplx *>(fftw_malloc(sizeof(fftw_complex) * n_));
  if (!buf_)
    throw std::bad_alloc();
  auto *b = reinterpret_cast<fftw_complex *>(buf_);
  int rank = int(extents_.size());
  fwd_ = fftw_plan_dft(rank, extents_.data(), b, b, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft(rank, extents_.data(), b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
  for (std::size_t i = 0; i < n_; i++)
    buf_[i] = 0.0;
}

DftPlan::~DftPlan()
{
  std::lock_guard<std::mutex> lock(plan_mutex);
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  fftw_free(buf_);
}

void DftPlan::forward()
{
  fftw_execute(static_cast<fftw_plan>(fwd_));
}

void DftPlan::backward()
{
  fftw_execute(static_cast<fftw_plan>(bwd_));
}

Dst1Plan::Dst1Plan(std::vector<int> extents) : extents_(std::move(extents))
{
  n_ = product(extents_);
  std::lock_guard<std::mutex> lock(plan_mutex);
  prepare_planner();
  buf_ = static_cast<double *>(fftw_malloc(sizeof(double) * n_));
  if (!buf_)
    throw std::bad_alloc();
  std::vector<fftw_r2r_kind> kinds(extents_.size(), FFTW_RODFT00);
  plan_ = fftw_plan_r2r(int(extents_.size()), extents_.data(), buf_, buf_, kinds.data(),
                        FFTW_ESTIMATE);
  for (std::size_t i = 0; i < n_; i++)
    buf_[i] = 0.0;
}

Dst1Plan::~Dst1Plan()
{
  std::lock_guard<std::mutex> lock(plan_mutex);
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  fftw_free(buf_);
}

void Dst1Plan::execute()
{
  fftw_execute(static_cast<fftw_plan>(plan_));
}

int good_size(int n)
{
  for (int m = std::max(n, 1);; m++)
  {
    int r = m;
    for (int p : {2, 3, 5})
      while (r % p == 0)
        r /= p;
    if (r == 1)
      return m;
  }
}

}  // namespace atc::fft
