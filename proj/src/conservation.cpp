#include "atc/conservation.hpp"

#include <cmath>
#include "atc/errors.hpp"
#include "atc/json_format.hpp"

namespace atc
{

namespace
{

using Array = std::vector<cplx>;

Array d(const Grid &g, const Array &f, int axis)
{
  return partial(g, f, axis, Diff::Central);
}

Array product(const Array &a, const Array &b)
{
  Array out(a.size());
  for (std::size_t n = 0; n < a.size(); n++)
    out[n] = a[n] * b[n];
  return out;
}

void add_to(Array &acc, const Array &x, double s = 1.0)
{
  for (std::size_t n = 0; n < acc.size(); n++)
    acc[n] += s * x[n];
}

// Nodes at least one spacing from every grid face (planar z excepted).
bool deep_interior(const Grid &g, const Index3 &n)
{
  for (int a = 0; a < g.dimension(); a++)
    if (n[a] < 1 || n[a] > g.dim(a) - 2)
      return false;
  return true;
}

double max_interior(const Grid &g, const Array &x)
{
  double m = 0.0;
  for (std::size_t n = 0; n < x.size(); n++)
    if (deep_interior(g, g.unravel(n)))
      m = std::max(m, std::abs(x[n]));
  return m;
}

// J shape {3, n} (or a vector when n = 1): component of J[i, b].
int jcomp(const Field &J, int i, int b)
{
  int n = J.components() / 3;
  return i * n + b;
}

int j_count(const Field &J)
{
  if (J.layout() == Layout::Vector)
    return 1;
  if (J.layout() == Layout::Tensor && J.shape().size() == 2 && J.shape()[0] == 3)
    return J.shape()[1];
  throw InvalidArgument("flux field must have shape {3, n}");
}

Eigen::MatrixXcd as_matrix(const std::vector<cplx> &v, const std::vector<int> &shape)
{
  if (shape.size() == 2)
  {
    Eigen::MatrixXcd m(shape[0], shape[1]);
    for (int r = 0; r < shape[0]; r++)
      for (int c = 0; c < shape[1]; c++)
        m(r, c) = v[r * shape[1] + c];
    return m;
  }
  Eigen::MatrixXcd m(v.size(), 1);
  for (std::size_t r = 0; r < v.size(); r++)
    m(r, 0) = v[r];
  return m;
}

double antisymmetry_of(const Eigen::MatrixXcd &W)
{
  if (W.rows() != W.cols() || W.norm() == 0.0)
    return 0.0;
  return (W + W.transpose()).norm() / W.norm();
}

}  // namespace

int vector_count(const Field &u)
{
  switch (u.layout())
  {
    case Layout::Scalar:
      return 1;
    case Layout::Vector:
      return 3;
    case Layout::Tensor:
      if (u.shape().size() == 1)
        return u.shape()[0];
      break;
    default:
      break;
  }
  throw InvalidArgument("expected a field with n components per node");
}

ConservationReport audit(const Field &Q, const Field &paired, const Region &region,
                         const AuditOptions &opts)
{
  if (Q.grid() != paired.grid())
    throw InvalidArgument("audit: supercurrent and paired product on different grids");
  require_inside(Q.grid(), region, "audit");
  int slot = opts.axis_slot;
  if (slot < 0)
    slot = Q.shape().size() == 3 ? 1 : 0;
  std::vector<int> rest;
  for (int s = 0; s < int(Q.shape().size()); s++)
    if (s != slot)
      rest.push_back(Q.shape()[s]);
  if (paired.components() * 3 != Q.components())
    throw InvalidArgument("audit: paired product does not match the supercurrent shape");

  ConservationReport rep;
  rep.identity = opts.identity;
  rep.region = region;
  std::vector<cplx> vol(paired.components());
  for (int c = 0; c < paired.components(); c++)
    vol[c] = volume_integral(paired, c, region);
  std::vector<cplx> sur = surface_flux(Q, slot, region, opts.surface);
  rep.volume_integral = as_matrix(vol, rest);
  rep.surface_integral = as_matrix(sur, rest);

  Field dq = tensor_div(Q, slot, Diff::Central);
  const Grid &g = Q.grid();
  double res = 0.0;
  for (std::size_t n : region_nodes(g, region))
  {
    if (!deep_interior(g, g.unravel(n)))
      continue;
    for (int c = 0; c < paired.components(); c++)
      res = std::max(res, std::abs(dq(n, c) - paired(n, c)));
  }
  rep.pointwise_residual_norm = res;
  double scale = std::max({rep.surface_integral.norm(), rep.volume_integral.norm(), opts.floor});
  rep.discrepancy = (rep.surface_integral - rep.volume_integral).norm() / scale;
  return rep;
}

std::string report_json(const ConservationReport &r)
{
  nlohmann::json j = {{"identity", r.identity},
                      {"region", to_json(r.region)},
                      {"W_volume", to_json(r.volume_integral)},
                      {"W_surface", to_json(r.surface_integral)},
                      {"discrepancy", r.discrepancy},
                      {"pointwise_residual", r.pointwise_residual_norm}};
  if (r.antisymmetry >= 0.0)
    j["antisymmetry"] = r.antisymmetry;
  return dump_json(j);
}

Field conductivity_supercurrent(const Field &V, const Field &j, std::string *warning,
                                double tolerance)
{
  require_layout(V, Layout::Scalar, "conductivity_supercurrent");
  require_layout(j, Layout::Vector, "conductivity_supercurrent");
  if (V.grid() != j.grid())
    throw InvalidArgument("conductivity_supercurrent: fields on different grids");
  if (warning)
  {
    const Grid &g = j.grid();
    double dj = max_interior(g, div(j, Diff::Central).data());
    double scale = j.max_abs() / g.spacing();
    warning->clear();
    if (dj > tolerance * std::max(scale, 1e-300))
      *warning = "current is not divergence free: max |div j| = " + std::to_string(dj);
  }
  Field Q = Field::vector(V.grid());
  for (std::size_t n = 0; n < V.grid().node_count(); n++)
    for (int a = 0; a < 3; a++)
      Q(n, a) = -V(n, 0) * j(n, a);
  return Q;
}

Field matrix_supercurrent(const Field &u0, const Field &J0)
{
  if (u0.grid() != J0.grid())
    throw InvalidArgument("matrix_supercurrent: fields on different grids");
  const int n = vector_count(u0);
  if (j_count(J0) != n)
    throw InvalidArgument("matrix_supercurrent: u0 has " + std::to_string(n) +
                          " components but J0 has " + std::to_string(j_count(J0)) + " columns");
  Field Q = Field::tensor(u0.grid(), {n, 3, n});
  for (std::size_t p = 0; p < u0.grid().node_count(); p++)
    for (int a = 0; a < n; a++)
      for (int i = 0; i < 3; i++)
        for (int b = 0; b < n; b++)
          Q(p, (a * 3 + i) * n + b) = u0(p, a) * J0(p, jcomp(J0, i, b));
  return Q;
}

Field gradient_pairing(const Field &u0, const Field &J0, Diff mode)
{
  const int n = vector_count(u0);
  if (j_count(J0) != n)
    throw InvalidArgument("gradient_pairing: shape mismatch");
  const Grid &g = u0.grid();
  Field P = Field::tensor(g, {n, n});
  for (int a = 0; a < n; a++)
  {
    Array ua = u0.component(a);
    for (int i = 0; i < 3; i++)
    {
      Array dua = partial(g, ua, i, mode);
      for (int b = 0; b < n; b++)
        for (std::size_t p = 0; p < g.node_count(); p++)
          P(p, a * n + b) += dua[p] * J0(p, jcomp(J0, i, b));
    }
  }
  return P;
}

namespace
{

// Shared construction for Q[A,i,B] = w_A (J_B)_i with J_B given per component,
// paired[A,B] = ∇w_A · J_B.
SupercurrentAudit build_pair_audit(const Grid &g, const std::vector<Array> &w,
                                   const std::vector<std::array<Array, 3>> &J,
                                   const std::vector<std::array<Array, 3>> &gw,
                                   const Region &region, const std::string &identity)
{
  const int m = int(w.size());
  SupercurrentAudit out{Field::tensor(g, {m, 3, m}), Field::tensor(g, {m, m}), {}};
  for (std::size_t p = 0; p < g.node_count(); p++)
    for (int A = 0; A < m; A++)
      for (int B = 0; B < m; B++)
      {
        cplx s = 0.0;
        for (int i = 0; i < 3; i++)
        {
          out.Q(p, (A * 3 + i) * m + B) = w[A][p] * J[B][i][p];
          s += gw[A][i][p] * J[B][i][p];
        }
        out.paired(p, A * m + B) = s;
      }
  AuditOptions opts;
  opts.identity = identity;
  out.report = audit(out.Q, out.paired, region, opts);
  out.report.antisymmetry = antisymmetry_of(out.report.volume_integral);
  return out;
}

std::vector<Array> components_of(const Field &u)
{
  std::vector<Array> c;
  for (int a = 0; a < vector_count(u); a++)
    c.push_back(u.component(a));
  return c;
}

}  // namespace

SupercurrentAudit antisymmetric_supercurrent_2d(const Field &u0, const Field &v0,
                                                const Region &region, Diff mode)
{
  const Grid &g = u0.grid();
  if (!g.planar())
    throw InvalidArgument("antisymmetric_supercurrent_2d needs a planar grid");
  if (v0.grid() != g || vector_count(u0) != vector_count(v0))
    throw InvalidArgument("antisymmetric_supercurrent_2d: u0 and v0 must match");
  std::vector<Array> w = components_of(u0);
  for (Array &c : components_of(v0))
    w.push_back(std::move(c));
  std::vector<std::array<Array, 3>> gw, J;
  for (const Array &c : w)
  {
    Array dx = partial(g, c, 0, mode), dy = partial(g, c, 1, mode);
    Array zero(c.size(), cplx(0.0));
    Array mdx = dx;
    for (auto &v : mdx)
      v = -v;
    gw.push_back({dx, dy, zero});
    J.push_back({dy, mdx, zero});
  }
  return build_pair_audit(g, w, J, gw, region, "antisymmetric-2d");
}

SupercurrentAudit antisymmetric_supercurrent_3d(const Field &u0, const Mat3 &A,
                                                const Region &region, Diff mode)
{
  if ((A + A.transpose()).norm() > 1e-14 * std::max(A.norm(), 1e-300))
    throw InvalidArgument("antisymmetric_supercurrent_3d: A + Aᵀ must vanish");
  const Grid &g = u0.grid();
  std::vector<Array> w = components_of(u0);
  std::vector<std::array<Array, 3>> gw, J;
  for (const Array &c : w)
  {
    std::array<Array, 3> gr = {partial(g, c, 0, mode), partial(g, c, 1, mode),
                               partial(g, c, 2, mode)};
    std::array<Array, 3> j;
    for (int i = 0; i < 3; i++)
    {
      j[i].assign(c.size(), cplx(0.0));
      for (int k = 0; k < 3; k++)
        if (A(i, k) != 0.0)
          add_to(j[i], gr[k], A(i, k));
    }
    gw.push_back(gr);
    J.push_back(j);
  }
  return build_pair_audit(g, w, J, gw, region, "antisymmetric-3d");
}

double key_identity_residual(const Field &u, const Field &R, KeyIdentity variant)
{
  if (u.grid() != R.grid())
    throw InvalidArgument("key_identity_residual: fields on different grids");
  const Grid &g = u.grid();
  const std::size_t N = g.node_count();
  double res = 0.0;
  if (variant == KeyIdentity::Gradient)
  {
    const int n = vector_count(u);
    if (j_count(R) != n)
      throw InvalidArgument("key_identity_residual: R must have shape {3, n}");
    for (int a = 0; a < n; a++)
    {
      Array ua = u.component(a);
      std::array<Array, 3> du = {d(g, ua, 0), d(g, ua, 1), d(g, ua, 2)};
      for (int b = 0; b < n; b++)
      {
        Array lhs(N, cplx(0.0)), divR(N, cplx(0.0)), divQ(N, cplx(0.0));
        for (int i = 0; i < 3; i++)
        {
          Array Rib = R.component(jcomp(R, i, b));
          add_to(lhs, product(du[i], Rib));
          add_to(divR, d(g, Rib, i));
          add_to(divQ, d(g, product(ua, Rib), i));
        }
        add_to(lhs, product(ua, divR));
        add_to(lhs, divQ, -1.0);
        res = std::max(res, max_interior(g, lhs));
      }
    }
    return res;
  }
  if (variant == KeyIdentity::Curl)
  {
    require_layout(u, Layout::Vector, "key_identity_residual");
    require_layout(R, Layout::Vector, "key_identity_residual");
    Field cr = curl(R, Diff::Central), cu = curl(u, Diff::Central);
    Field Q = Field::vector(g);
    Array lhs(N, cplx(0.0));
    for (std::size_t p = 0; p < N; p++)
    {
      Vec3c uu(u(p, 0), u(p, 1), u(p, 2)), rr(R(p, 0), R(p, 1), R(p, 2));
      Vec3c q = cross(uu, rr);
      for (int a = 0; a < 3; a++)
      {
        Q(p, a) = q[a];
        lhs[p] += -cr(p, a) * uu[a] + rr[a] * cu(p, a);
      }
    }
    add_to(lhs, div(Q, Diff::Central).data(), -1.0);
    return max_interior(g, lhs);
  }
  throw InvalidArgument("the space-time identity needs space-time fields");
}

double key_identity_residual(const SpaceTimeField &u, const SpaceTimeField &r,
                             KeyIdentity variant)
{
  if (variant != KeyIdentity::SpaceTime)
    throw InvalidArgument("space-time fields only support the space-time identity");
  const int T = int(u.frames.size());
  if (T < 3 || int(r.frames.size()) != T || !(u.dt > 0.0) || u.dt != r.dt)
    throw InvalidArgument("space-time fields need >= 3 matching frames and a positive step");
  const Grid &g = u.frames[0].grid();
  const std::size_t N = g.node_count();
  const int n = vector_count(u.frames[0]);
  if (j_count(r.frames[0]) != n)
    throw InvalidArgument("key_identity_residual: r must have shape {3, n}");
  const double dt = u.dt;
  auto dt_of = [&](const SpaceTimeField &f, int t, int comp) {
    Array a = f.frames[t + 1].component(comp), b = f.frames[t - 1].component(comp);
    for (std::size_t p = 0; p < N; p++)
      a[p] = (a[p] - b[p]) / (2.0 * dt);
    return a;
  };
  // Q_t[a,b] = Σ_i ∂_i u_a r[i,b] at frame t
  auto q_time = [&](int t, int a, int b) {
    Array ua = u.frames[t].component(a);
    Array q(N, cplx(0.0));
    for (int i = 0; i < 3; i++)
      add_to(q, product(d(g, ua, i), r.frames[t].component(jcomp(r.frames[t], i, b))));
    return q;
  };
  double res = 0.0;
  for (int t = 1; t + 1 < T; t++)
    for (int a = 0; a < n; a++)
    {
      Array ua = u.frames[t].component(a);
      Array uta = dt_of(u, t, a);
      for (int b = 0; b < n; b++)
      {
        Array lhs(N, cplx(0.0)), divr(N, cplx(0.0)), divQ(N, cplx(0.0));
        for (int i = 0; i < 3; i++)
        {
          int rc = jcomp(r.frames[t], i, b);
          Array rib = r.frames[t].component(rc);
          add_to(lhs, product(d(g, ua, i), dt_of(r, t, rc)));
          add_to(divr, d(g, rib, i));
          add_to(divQ, d(g, product(uta, rib), i), -1.0);
        }
        add_to(lhs, product(uta, divr), -1.0);
        Array qp = q_time(t + 1, a, b), qm = q_time(t - 1, a, b);
        for (std::size_t p = 0; p < N; p++)
          divQ[p] += (qp[p] - qm[p]) / (2.0 * dt);
        add_to(lhs, divQ, -1.0);
        res = std::max(res, max_interior(g, lhs));
      }
    }
  return res;
}

}  // namespace atc
