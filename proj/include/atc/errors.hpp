#pragma once

#include <stdexcept>
#include <string>

namespace atc
{

// Precondition violated by the caller (bad shapes, layouts, regions, parameters).
class InvalidArgument : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// Iteration failed to reach tolerance within its budget.
class NonConvergence : public std::runtime_error
{
public:
  NonConvergence(const std::string &what, int iterations, double residual,
                 double contraction)
    : std::runtime_error(what), iterations(iterations), residual(residual),
      contraction(contraction)
  {
  }
  int iterations;
  double residual;
  // Estimated ratio between successive updates (spectral radius of the series).
  double contraction;
};

// Fewer grid nodes per wavelength than the discretization supports.
class ResolutionError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class UnsupportedMedium : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace atc
