#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace atc
{

using LinearOperator = std::function<void(const Eigen::VectorXcd &x, Eigen::VectorXcd &y)>;

struct KrylovOptions
{
  double tol = 1e-8;  // relative residual ‖b - Ax‖/‖b‖
  int max_iter = 500;
  int restart = 60;
  std::string label = "solve";  // used in NonConvergence messages
};

struct KrylovResult
{
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;  // relative residual after each iteration
  // Geometric mean residual reduction per iteration.
  double contraction() const;
};

// Restarted GMRES with modified Gram-Schmidt; x holds the initial guess.
KrylovResult gmres(const LinearOperator &A, const Eigen::VectorXcd &b, Eigen::VectorXcd &x,
                   const KrylovOptions &opts = {});

// Plain fixed-point (Born) iteration x <- b + x - A x, i.e. the Neumann
// series of A = I - K.
KrylovResult richardson(const LinearOperator &A, const Eigen::VectorXcd &b, Eigen::VectorXcd &x,
                        const KrylovOptions &opts = {});

}  // namespace atc
