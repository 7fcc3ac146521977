#include "atc/krylov.hpp"

#include <cmath>
#include "atc/errors.hpp"
#include "atc/grid.hpp"

namespace atc
{

double KrylovResult::contraction() const
{
  if (history.size() < 2 || history.front() <= 0)
    return 0.0;
  return std::pow(history.back() / history.front(), 1.0 / double(history.size() - 1));
}

namespace
{

[[noreturn]] void fail(const KrylovOptions &opts, const KrylovResult &r)
{
  throw NonConvergence(opts.label + ": residual " + std::to_string(r.residual) +
                           " above tolerance after " + std::to_string(r.iterations) +
                           " iterations",
                       r.iterations, r.residual, r.contraction());
}

}  // namespace

KrylovResult gmres(const LinearOperator &A, const Eigen::VectorXcd &b, Eigen::VectorXcd &x,
                   const KrylovOptions &opts)
{
  KrylovResult res;
  const Eigen::Index n = b.size();
  if (x.size() != n)
    x = Eigen::VectorXcd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0)
  {
    x.setZero();
    return res;
  }
  const int m = std::max(1, opts.restart);
  Eigen::VectorXcd r(n), w(n);
  std::vector<Eigen::VectorXcd> V;
  Eigen::MatrixXcd H(m + 1, m);
  Eigen::VectorXcd cs(m), sn(m), g(m + 1);
  A(x, w);
  r = b - w;
  res.residual = r.norm() / bnorm;
  res.history.push_back(res.residual);
  while (res.residual > opts.tol && res.iterations < opts.max_iter)
  {
    double beta = r.norm();
    V.assign(1, r / beta);
    H.setZero();
    g.setZero();
    g[0] = beta;
    int j = 0;
    for (; j < m && res.iterations < opts.max_iter; j++)
    {
      A(V[j], w);
      for (int i = 0; i <= j; i++)
      {
        H(i, j) = V[i].dot(w);  // conjugates V[i]
        w -= H(i, j) * V[i];
      }
      const double hn = w.norm();
      H(j + 1, j) = hn;
      // apply previous rotations
      for (int i = 0; i < j; i++)
      {
        cplx t = std::conj(cs[i]) * H(i, j) + std::conj(sn[i]) * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      double den = std::hypot(std::abs(H(j, j)), std::abs(H(j + 1, j)));
      cs[j] = den > 0 ? H(j, j) / den : 1.0;
      sn[j] = den > 0 ? H(j + 1, j) / den : 0.0;
      H(j, j) = den;
      H(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = std::conj(cs[j]) * g[j];
      res.iterations++;
      res.residual = std::abs(g[j + 1]) / bnorm;
      res.history.push_back(res.residual);
      if (res.residual <= opts.tol || hn == 0.0)
      {
        j++;
        break;
      }
      V.push_back(w / hn);
    }
    // solve the triangular system and update
    Eigen::VectorXcd y = H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    for (int i = 0; i < j; i++)
      x += y[i] * V[i];
    A(x, w);
    r = b - w;
    res.residual = r.norm() / bnorm;
    res.history.back() = res.residual;
    if (!std::isfinite(res.residual))
      fail(opts, res);
  }
  if (res.residual > opts.tol)
    fail(opts, res);
  return res;
}

KrylovResult richardson(const LinearOperator &A, const Eigen::VectorXcd &b, Eigen::VectorXcd &x,
                        const KrylovOptions &opts)
{
  KrylovResult res;
  if (x.size() != b.size())
    x = Eigen::VectorXcd::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0)
  {
    x.setZero();
    return res;
  }
  Eigen::VectorXcd w(b.size());
  A(x, w);
  Eigen::VectorXcd r = b - w;
  res.residual = r.norm() / bnorm;
  res.history.push_back(res.residual);
  while (res.residual > opts.tol)
  {
    if (res.iterations >= opts.max_iter || !std::isfinite(res.residual) ||
        (res.iterations > 5 && res.residual > 1e3 * res.history.front()))
      fail(opts, res);
    x += r;
    A(x, w);
    r = b - w;
    res.iterations++;
    res.residual = r.norm() / bnorm;
    res.history.push_back(res.residual);
  }
  return res;
}

}  // namespace atc
