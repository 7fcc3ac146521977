#pragma once

#include <cmath>
#include <random>
#include "atc/field.hpp"

namespace atc::test
{

inline Field random_field(const Grid &g, Layout layout, std::mt19937_64 &rng,
                          std::vector<int> shape = {})
{
  std::normal_distribution<double> nd;
  Field f(g, layout, std::move(shape));
  for (auto &v : f.data())
    v = cplx(nd(rng), nd(rng));
  return f;
}

inline double rel_diff(const Field &a, const Field &b)
{
  return (a - b).norm() / std::max(a.norm(), b.norm());
}

// Smooth compactly supported bump: (1 - |x-c|²/r²)^4 inside the ball, 0 outside.
inline double bump(const Vec3 &x, const Vec3 &c, double r)
{
  double s = (x - c).squaredNorm() / (r * r);
  return s < 1.0 ? std::pow(1.0 - s, 4) : 0.0;
}

// Convergence order from errors at spacing h and h/2.
inline double order(double coarse, double fine)
{
  return std::log2(coarse / fine);
}

}  // namespace atc::test
