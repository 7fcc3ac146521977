#include "atc/scenario.hpp"

#include <yaml-cpp/yaml.h>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include "atc/bvp.hpp"
#include "atc/em.hpp"
#include "atc/errors.hpp"
#include "atc/field_io.hpp"
#include "atc/fft.hpp"
#include "atc/integrals.hpp"
#include "atc/json_format.hpp"
#include "atc/polarizability.hpp"
#include "atc/projections.hpp"

namespace atc
{

namespace
{

constexpr double pi = std::numbers::pi;

const std::map<std::string, ScenarioKind> kinds = {
    {"project", ScenarioKind::Project},   {"bvp-dtn", ScenarioKind::BvpDtn},
    {"polarize", ScenarioKind::Polarize}, {"acoustic", ScenarioKind::Acoustic},
    {"em", ScenarioKind::Em},             {"audit", ScenarioKind::Audit}};

using Poly = std::function<cplx(const Vec3 &)>;
const std::map<std::string, Poly> polynomials = {
    {"x", [](const Vec3 &x) { return cplx(x[0]); }},
    {"y", [](const Vec3 &x) { return cplx(x[1]); }},
    {"z", [](const Vec3 &x) { return cplx(x[2]); }},
    {"xy", [](const Vec3 &x) { return cplx(x[0] * x[1]); }},
    {"yz", [](const Vec3 &x) { return cplx(x[1] * x[2]); }},
    {"xz", [](const Vec3 &x) { return cplx(x[0] * x[2]); }},
    {"x2-y2", [](const Vec3 &x) { return cplx(x[0] * x[0] - x[1] * x[1]); }},
    {"x3-3xy2", [](const Vec3 &x) { return cplx(x[0] * x[0] * x[0] - 3 * x[0] * x[1] * x[1]); }}};

// properties each kind paints, and the fields it can write
const std::map<ScenarioKind, std::set<std::string>> properties = {
    {ScenarioKind::Project, {}},
    {ScenarioKind::BvpDtn, {"sigma"}},
    {ScenarioKind::Audit, {"sigma"}},
    {ScenarioKind::Polarize, {"epsilon"}},
    {ScenarioKind::Acoustic, {"rho", "kappa"}},
    {ScenarioKind::Em, {"epsilon", "mu"}}};
const std::map<ScenarioKind, std::set<std::string>> field_names = {
    {ScenarioKind::Project, {}},
    {ScenarioKind::BvpDtn, {}},
    {ScenarioKind::Audit, {"V", "e", "j"}},
    {ScenarioKind::Polarize, {"e_s", "d_s", "phi_s"}},
    {ScenarioKind::Acoustic, {"P_s", "v_s", "E_s", "J_s"}},
    {ScenarioKind::Em, {"e_s", "h_s", "E_s", "J_s"}}};

class Reader
{
public:
  std::vector<Diagnostic> diags;

  void error(const std::string &path, const std::string &msg) { diags.push_back({path, msg}); }

  // Flags keys outside `allowed`.
  void keys(const YAML::Node &n, const std::string &path, std::set<std::string> allowed)
  {
    if (!n)
      return;
    if (!n.IsMap())
    {
      error(path, "expected a table");
      return;
    }
    for (const auto &kv : n)
    {
      const std::string k = kv.first.as<std::string>();
      if (!allowed.count(k))
        error(join(path, k), "unknown key");
    }
  }

  static std::string join(const std::string &path, const std::string &key)
  {
    return path.empty() ? key : path + "." + key;
  }

  bool number(const YAML::Node &n, const std::string &path, double &out)
  {
    if (!n)
      return false;
    try
    {
      out = n.as<double>();
      if (!std::isfinite(out))
        error(path, "must be finite");
      return true;
    }
    catch (const YAML::Exception &)
    {
      error(path, "expected a number");
      return false;
    }
  }

  bool integer(const YAML::Node &n, const std::string &path, int &out)
  {
    if (!n)
      return false;
    try
    {
      out = n.as<int>();
      return true;
    }
    catch (const YAML::Exception &)
    {
      error(path, "expected an integer");
      return false;
    }
  }

  bool boolean(const YAML::Node &n, const std::string &path, bool &out)
  {
    if (!n)
      return false;
    try
    {
      out = n.as<bool>();
      return true;
    }
    catch (const YAML::Exception &)
    {
      error(path, "expected true or false");
      return false;
    }
  }

  bool text(const YAML::Node &n, const std::string &path, std::string &out)
  {
    if (!n)
      return false;
    if (!n.IsScalar())
    {
      error(path, "expected a string");
      return false;
    }
    out = n.as<std::string>();
    return true;
  }

  // number or [re, im]
  bool complex(const YAML::Node &n, const std::string &path, cplx &out)
  {
    if (!n)
      return false;
    if (n.IsSequence() && n.size() == 2)
    {
      double re = 0, im = 0;
      bool ok = number(n[0], path + "[0]", re) && number(n[1], path + "[1]", im);
      out = cplx(re, im);
      return ok;
    }
    double re = 0;
    if (n.IsScalar() && number(n, path, re))
    {
      out = re;
      return true;
    }
    error(path, "expected a number or [re, im]");
    return false;
  }

  bool vec3(const YAML::Node &n, const std::string &path, Vec3 &out)
  {
    if (!n)
      return false;
    if (!n.IsSequence() || n.size() != 3)
    {
      error(path, "expected three numbers");
      return false;
    }
    bool ok = true;
    for (int a = 0; a < 3; a++)
      ok = number(n[a], path + "[" + std::to_string(a) + "]", out[a]) && ok;
    return ok;
  }

  bool vec3c(const YAML::Node &n, const std::string &path, Vec3c &out)
  {
    if (!n)
      return false;
    if (!n.IsSequence() || n.size() != 3)
    {
      error(path, "expected three components");
      return false;
    }
    bool ok = true;
    for (int a = 0; a < 3; a++)
      ok = complex(n[a], path + "[" + std::to_string(a) + "]", out[a]) && ok;
    return ok;
  }

  // scalar, [re, im], diagonal [a, b, c] or 3x3 rows
  bool tensor(const YAML::Node &n, const std::string &path, Mat3c &out)
  {
    if (!n)
      return false;
    if (n.IsSequence() && n.size() == 3 && n[0].IsSequence() && n[0].size() == 3)
    {
      bool ok = true;
      for (int r = 0; r < 3; r++)
      {
        Vec3c row;
        ok = vec3c(n[r], path + "[" + std::to_string(r) + "]", row) && ok;
        out.row(r) = row.transpose();
      }
      return ok;
    }
    if (n.IsSequence() && n.size() == 3)
    {
      Vec3c d;
      bool ok = vec3c(n, path, d);
      out = d.asDiagonal();
      return ok;
    }
    cplx v;
    if (!complex(n, path, v))
      return false;
    out = isotropic(v);
    return true;
  }

  void strings(const YAML::Node &n, const std::string &path, std::vector<std::string> &out)
  {
    if (!n)
      return;
    if (!n.IsSequence())
    {
      error(path, "expected a list");
      return;
    }
    out.clear();
    for (std::size_t i = 0; i < n.size(); i++)
    {
      std::string s;
      if (text(n[i], path + "[" + std::to_string(i) + "]", s))
        out.push_back(s);
    }
  }
};

bool is_scattering(ScenarioKind k)
{
  return k == ScenarioKind::Acoustic || k == ScenarioKind::Em;
}

double background_of(const Scenario &s, const std::string &prop)
{
  if (prop == "sigma")
    return s.sigma0;
  if (prop == "epsilon")
    return s.epsilon0;
  if (prop == "mu")
    return s.mu0;
  if (prop == "rho")
    return s.rho0;
  return s.kappa0;
}

double wavenumber_of(const Scenario &s)
{
  if (s.kind == ScenarioKind::Acoustic)
    return s.omega * std::sqrt(s.rho0 / s.kappa0);
  return s.omega * std::sqrt(s.epsilon0 * s.mu0);
}

// Largest distance from the origin reached by painted shapes.
double material_reach(const Scenario &s)
{
  double r = 0.0;
  for (const ShapeSpec &sh : s.shapes)
  {
    if (sh.type == ShapeSpec::Ball)
      r = std::max(r, sh.center.norm() + sh.radius);
    else if (sh.type == ShapeSpec::Box)
      for (int c = 0; c < 8; c++)
      {
        Vec3 p((c & 1) ? sh.hi[0] : sh.lo[0], (c & 2) ? sh.hi[1] : sh.lo[1],
               (c & 4) ? sh.hi[2] : sh.lo[2]);
        r = std::max(r, p.norm());
      }
  }
  return r;
}

double half_width(const Scenario &s)
{
  int n = std::min({s.dims[0], s.dims[1], s.dims[2]});
  return 0.5 * (n - 1) * s.spacing;
}

void check_shell(const Scenario &s, double R, const std::string &path, Reader &rd)
{
  const double h = s.spacing;
  const ShellOptions so;
  if (R <= 0.0)
  {
    rd.error(path, "must be positive");
    return;
  }
  if (R * (1.0 - so.shell_fraction) < material_reach(s) + h)
    rd.error(path, "extraction shell reaches into the materials");
  if (R * (1.0 + so.shell_fraction) + h > half_width(s))
    rd.error(path, "extraction shell leaves the grid");
}

void check_passive(const Mat3c &v, bool rho_like, const std::string &path, Reader &rd)
{
  // Im ε ⪰ 0 and Im ρ ⪰ 0 (Hermitian part of the imaginary part)
  Mat3c im = (v - v.adjoint()) / cplx(0.0, 2.0);
  double lo = Eigen::SelfAdjointEigenSolver<Mat3c>(im).eigenvalues().minCoeff();
  if (lo < -1e-14 * v.norm())
    rd.error(path, rho_like ? "imaginary part of rho must be positive semidefinite (passivity)"
                            : "imaginary part must be positive semidefinite (passivity)");
}

void physics_checks(Scenario &s, Reader &rd)
{
  const double h = s.spacing;
  bool grid_ok = h > 0.0;
  for (int a = 0; a < 3; a++)
    grid_ok = grid_ok && s.dims[a] >= 4;

  const bool scatter = is_scattering(s.kind);
  if (scatter)
  {
    if (s.omega <= 0.0)
      rd.error("medium.omega", "must be positive");
    else
    {
      const double k = wavenumber_of(s);
      if (s.k0 == 0.0)
        s.k0 = k;
      else if (std::abs(s.k0 - k) > 1e-10 * k)
        rd.error("excitation.k0",
                 s.kind == ScenarioKind::Acoustic
                     ? "inconsistent with omega, rho and kappa (k0 = omega sqrt(rho/kappa))"
                     : "inconsistent with omega, epsilon and mu (k0 = omega sqrt(epsilon mu))");
    }
    if (s.direction.norm() == 0.0)
      rd.error("excitation.direction", "must be nonzero");
    else
      s.direction.normalize();
    if (s.kind == ScenarioKind::Em && s.direction.norm() > 0.0 &&
        std::abs(s.direction.cast<cplx>().dot(s.e0)) > 1e-12 * std::max(1.0, s.e0.norm()))
      rd.error("excitation.e0", "must be transverse to the direction");
  }
  if (s.kind == ScenarioKind::Polarize && s.omega < 0.0)
    rd.error("medium.omega", "must be non-negative");

  double kmax = scatter && s.omega > 0 ? wavenumber_of(s) : 0.0;
  for (std::size_t i = 0; i < s.shapes.size(); i++)
  {
    const ShapeSpec &sh = s.shapes[i];
    const std::string path = "materials[" + std::to_string(i) + "]";
    const auto allowed = properties.at(s.kind);
    if (!allowed.count(sh.property))
    {
      rd.error(path, "property '" + sh.property + "' is not used by kind " + kind_name(s.kind));
      continue;
    }
    if (sh.type == ShapeSpec::Ball && sh.radius <= 0.0)
      rd.error(path + ".radius", "must be positive");
    if (sh.type == ShapeSpec::Box && (sh.hi - sh.lo).minCoeff() <= 0.0)
      rd.error(path, "box needs lo < hi on every axis");
    if (sh.type == ShapeSpec::HalfSpace)
    {
      if (s.kind != ScenarioKind::BvpDtn && s.kind != ScenarioKind::Audit)
        rd.error(path, "half-spaces are unbounded; only conductivity kinds accept them");
      if (sh.normal.norm() == 0.0)
        rd.error(path + ".normal", "must be nonzero");
    }

    const Mat3c &v = sh.value;
    if (sh.property == "sigma")
    {
      if (v.imag().norm() != 0.0)
        rd.error(path + ".sigma", "must be real");
      Eigen::Matrix3d re = v.real();
      if ((re - re.transpose()).norm() > 1e-12 * re.norm() ||
          Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(re).eigenvalues().minCoeff() <= 0.0)
        rd.error(path + ".sigma", "must be symmetric positive definite");
    }
    else if (sh.property == "kappa")
    {
      if (!v.isApprox(isotropic(v(0, 0))))
        rd.error(path + ".kappa", "must be a scalar");
      if (v(0, 0).imag() > 0.0)
        rd.error(path + ".kappa", "Im kappa must be non-positive (passivity)");
      if (std::abs(v(0, 0)) == 0.0)
        rd.error(path + ".kappa", "must be nonzero");
    }
    else if (sh.property == "mu")
    {
      if (!v.isApprox(isotropic(s.mu0)))
        rd.error(path + ".mu", "the EM solver supports mu = mu0 only");
    }
    else
      check_passive(v, sh.property == "rho", path + "." + sh.property, rd);

    if (sh.type == ShapeSpec::HalfSpace || !grid_ok)
      continue;
    // padding between the shape and the grid faces
    Vec3 lo, hi;
    if (sh.type == ShapeSpec::Ball)
    {
      lo = sh.center.array() - sh.radius;
      hi = sh.center.array() + sh.radius;
    }
    else
    {
      lo = sh.lo;
      hi = sh.hi;
    }
    double gap = 1e300, diameter = 0.0;
    for (int a = 0; a < 3; a++)
    {
      const double hw = 0.5 * (s.dims[a] - 1) * h;
      gap = std::min({gap, (lo[a] + hw) / h, (hw - hi[a]) / h});
      diameter = std::max(diameter, (hi[a] - lo[a]) / h);
    }
    double need = 2.0;
    if (s.kind == ScenarioKind::Polarize)
      need = std::max(need, diameter);
    if ((scatter || s.kind == ScenarioKind::Polarize) && gap < need)
      rd.error(path, "padding: support comes within " + std::to_string(int(std::floor(gap))) +
                         " nodes of the grid edge (needs " + std::to_string(int(std::ceil(need))) +
                         ")");

    if (scatter && s.omega > 0.0)
    {
      const double bg = background_of(s, sh.property);
      const double nv = v.operatorNorm();
      if (sh.property == "rho")
        kmax = std::max(kmax, s.omega * std::sqrt(nv / s.kappa0));
      else if (sh.property == "kappa")
        kmax = std::max(kmax, s.omega * std::sqrt(s.rho0 / std::abs(v(0, 0))));
      else if (sh.property == "epsilon")
        kmax = std::max(kmax, wavenumber_of(s) * std::sqrt(nv / bg));
    }
  }
  if (!grid_ok)
    return;
  if (scatter && kmax > 0.0)
  {
    const double need = s.kind == ScenarioKind::Acoustic ? 8.0 : 10.0;
    if (2 * pi / (kmax * h) < need)
      rd.error("grid.spacing", "resolution: fewer than " + std::to_string(int(need)) +
                                   " nodes per wavelength in the densest material");
  }

  if (scatter)
  {
    if (s.farfield_radius != 0.0)
      check_shell(s, s.farfield_radius, "output.farfield_radius", rd);
    else if (default_farfield_radius(s) <= 0.0)
      rd.error("output.farfield_radius", "grid too small for an extraction shell around the materials");
    if (s.auxiliary_radius != 0.0)
      check_shell(s, s.auxiliary_radius, "output.auxiliary_radius", rd);
    if (s.directions < 1)
      rd.error("output.directions", "must be at least 1");
  }

  if (s.kind == ScenarioKind::BvpDtn || s.kind == ScenarioKind::Audit)
  {
    if (s.margin < 0 || 2 * s.margin + 3 > std::min({s.dims[0], s.dims[1], s.dims[2]}))
      rd.error("solver.margin", "leaves no interior in the domain box");
    else if (s.kind == ScenarioKind::BvpDtn)
    {
      std::size_t nb = 1, ni = 1;
      for (int a = 0; a < 3; a++)
      {
        nb *= std::size_t(s.dims[a] - 2 * s.margin);
        ni *= std::size_t(s.dims[a] - 2 * s.margin - 2);
      }
      if (nb - ni > DtnOptions{}.dense_limit)
        rd.error("grid.dims", "too many boundary nodes for a dense DtN map");
    }
    if (s.reference_sigma < 0.0)
      rd.error("solver.reference_sigma", "must be non-negative");
  }
  if (s.kind == ScenarioKind::Project && s.random_fields < 1)
    rd.error("excitation.fields", "must be at least 1");
}

void parse_node(const YAML::Node &root, Scenario &s, Reader &rd)
{
  if (!root.IsMap())
  {
    rd.error("", "config must be a table");
    return;
  }
  rd.keys(root, "", {"kind", "name", "grid", "medium", "materials", "excitation", "solver",
                     "output", "seed"});

  std::string kind;
  if (!rd.text(root["kind"], "kind", kind))
    rd.error("kind", "missing");
  else if (!kinds.count(kind))
    rd.error("kind", "unknown kind '" + kind + "' (project, bvp-dtn, polarize, acoustic, em, audit)");
  else
    s.kind = kinds.at(kind);
  const bool kind_ok = kinds.count(kind) > 0;
  rd.text(root["name"], "name", s.name);

  const YAML::Node g = root["grid"];
  if (!g)
    rd.error("grid", "missing");
  else
  {
    rd.keys(g, "grid", {"dims", "spacing"});
    const YAML::Node d = g["dims"];
    if (!d)
      rd.error("grid.dims", "missing");
    else if (d.IsScalar())
    {
      int n = 0;
      if (rd.integer(d, "grid.dims", n))
        s.dims = {n, n, n};
    }
    else if (d.IsSequence() && d.size() == 3)
    {
      for (int a = 0; a < 3; a++)
        rd.integer(d[a], "grid.dims[" + std::to_string(a) + "]", s.dims[a]);
    }
    else
      rd.error("grid.dims", "expected an integer or three integers");
    for (int a = 0; a < 3; a++)
      if (d && s.dims[a] < 4)
      {
        rd.error("grid.dims", "every axis needs at least 4 nodes");
        break;
      }
    if (!rd.number(g["spacing"], "grid.spacing", s.spacing))
      rd.error("grid.spacing", "missing");
    else if (s.spacing <= 0.0)
      rd.error("grid.spacing", "must be positive");
  }

  const YAML::Node m = root["medium"];
  rd.keys(m, "medium", {"omega", "sigma", "epsilon", "mu", "rho", "kappa"});
  if (m)
  {
    rd.number(m["omega"], "medium.omega", s.omega);
    for (auto [key, ptr] : std::initializer_list<std::pair<const char *, double *>>{
             {"sigma", &s.sigma0}, {"epsilon", &s.epsilon0}, {"mu", &s.mu0}, {"rho", &s.rho0},
             {"kappa", &s.kappa0}})
      if (rd.number(m[key], std::string("medium.") + key, *ptr) && *ptr <= 0.0)
        rd.error(std::string("medium.") + key, "background must be real and positive");
  }

  const YAML::Node mats = root["materials"];
  if (mats && !mats.IsSequence())
    rd.error("materials", "expected a list");
  else if (mats)
    for (std::size_t i = 0; i < mats.size(); i++)
    {
      const std::string path = "materials[" + std::to_string(i) + "]";
      const YAML::Node n = mats[i];
      rd.keys(n, path, {"shape", "center", "radius", "lo", "hi", "normal", "offset", "mixing",
                        "sigma", "epsilon", "mu", "rho", "kappa"});
      if (!n.IsMap())
        continue;
      ShapeSpec sh;
      std::string shape;
      if (!rd.text(n["shape"], path + ".shape", shape))
        rd.error(path + ".shape", "missing");
      else if (shape == "ball")
      {
        sh.type = ShapeSpec::Ball;
        rd.vec3(n["center"], path + ".center", sh.center);
        if (!rd.number(n["radius"], path + ".radius", sh.radius))
          rd.error(path + ".radius", "missing");
      }
      else if (shape == "box")
      {
        sh.type = ShapeSpec::Box;
        if (!rd.vec3(n["lo"], path + ".lo", sh.lo))
          rd.error(path + ".lo", "missing");
        if (!rd.vec3(n["hi"], path + ".hi", sh.hi))
          rd.error(path + ".hi", "missing");
      }
      else if (shape == "half_space")
      {
        sh.type = ShapeSpec::HalfSpace;
        if (!rd.vec3(n["normal"], path + ".normal", sh.normal))
          rd.error(path + ".normal", "missing");
        rd.number(n["offset"], path + ".offset", sh.offset);
      }
      else
        rd.error(path + ".shape", "unknown shape '" + shape + "' (ball, box, half_space)");

      int found = 0;
      for (const char *p : {"sigma", "epsilon", "mu", "rho", "kappa"})
        if (n[p])
        {
          found++;
          sh.property = p;
          rd.tensor(n[p], path + "." + p, sh.value);
        }
      if (found != 1)
        rd.error(path, "exactly one of sigma, epsilon, mu, rho, kappa is required");
      sh.mixing = (sh.property == "rho" || sh.property == "kappa") ? Mixing::Harmonic
                                                                     : Mixing::Arithmetic;
      std::string mix;
      if (rd.text(n["mixing"], path + ".mixing", mix))
      {
        if (mix == "arithmetic")
          sh.mixing = Mixing::Arithmetic;
        else if (mix == "harmonic")
          sh.mixing = Mixing::Harmonic;
        else
          rd.error(path + ".mixing", "expected arithmetic or harmonic");
      }
      s.shapes.push_back(sh);
    }

  const YAML::Node e = root["excitation"];
  rd.keys(e, "excitation", {"amplitude", "direction", "k0", "e0", "boundary", "fields"});
  if (e)
  {
    rd.complex(e["amplitude"], "excitation.amplitude", s.amplitude);
    rd.vec3(e["direction"], "excitation.direction", s.direction);
    rd.number(e["k0"], "excitation.k0", s.k0);
    rd.vec3c(e["e0"], "excitation.e0", s.e0);
    rd.strings(e["boundary"], "excitation.boundary", s.boundary);
    rd.integer(e["fields"], "excitation.fields", s.random_fields);
  }
  for (std::size_t i = 0; i < s.boundary.size(); i++)
    if (!polynomials.count(s.boundary[i]))
      rd.error("excitation.boundary[" + std::to_string(i) + "]",
               "unknown polynomial '" + s.boundary[i] + "'");
  if (s.boundary.empty())
    s.boundary = {"x"};

  const YAML::Node so = root["solver"];
  rd.keys(so, "solver", {"tol", "max_iter", "method", "reference_sigma", "margin"});
  if (so)
  {
    if (rd.number(so["tol"], "solver.tol", s.tol) && s.tol <= 0.0)
      rd.error("solver.tol", "must be positive");
    if (rd.integer(so["max_iter"], "solver.max_iter", s.max_iter) && s.max_iter <= 0)
      rd.error("solver.max_iter", "must be positive");
    std::string method;
    if (rd.text(so["method"], "solver.method", method))
    {
      if (method == "gmres")
        s.method = SolverMethod::Gmres;
      else if (method == "born")
        s.method = SolverMethod::Born;
      else
        rd.error("solver.method", "expected gmres or born");
    }
    rd.number(so["reference_sigma"], "solver.reference_sigma", s.reference_sigma);
    rd.integer(so["margin"], "solver.margin", s.margin);
  }

  const YAML::Node o = root["output"];
  rd.keys(o, "output", {"directions", "farfield_radius", "auxiliary_radius", "identity", "fields"});
  if (o)
  {
    rd.integer(o["directions"], "output.directions", s.directions);
    rd.number(o["farfield_radius"], "output.farfield_radius", s.farfield_radius);
    rd.number(o["auxiliary_radius"], "output.auxiliary_radius", s.auxiliary_radius);
    rd.boolean(o["identity"], "output.identity", s.identity);
    rd.strings(o["fields"], "output.fields", s.fields);
  }
  if (kind_ok)
    for (std::size_t i = 0; i < s.fields.size(); i++)
      if (!field_names.at(s.kind).count(s.fields[i]))
        rd.error("output.fields[" + std::to_string(i) + "]",
                 "no field '" + s.fields[i] + "' for kind " + kind);

  if (root["seed"])
  {
    try
    {
      s.seed = root["seed"].as<std::uint64_t>();
    }
    catch (const YAML::Exception &)
    {
      rd.error("seed", "expected a non-negative integer");
    }
  }

  if (kind_ok)
    physics_checks(s, rd);
}

// ---------------------------------------------------------------- running

Grid make_grid(const Scenario &s) { return Grid::centered(s.dims, s.spacing); }

void paint(TensorMap &map, const ShapeSpec &sh)
{
  if (sh.type == ShapeSpec::Ball)
    paint_ball(map, Ball{sh.center, sh.radius}, sh.value, sh.mixing);
  else if (sh.type == ShapeSpec::Box)
    paint_box(map, sh.lo, sh.hi, sh.value, sh.mixing);
  else
    paint_half_space(map, sh.normal.normalized(), sh.offset, sh.value, sh.mixing);
}

void paint(ScalarMap &map, const ShapeSpec &sh)
{
  if (sh.type == ShapeSpec::Ball)
    paint_ball(map, Ball{sh.center, sh.radius}, sh.value(0, 0), sh.mixing);
  else
    paint_box(map, sh.lo, sh.hi, sh.value(0, 0), sh.mixing);
}

TensorMap painted(const Scenario &s, const Grid &g, const std::string &prop)
{
  TensorMap m(g, isotropic(background_of(s, prop)));
  for (const ShapeSpec &sh : s.shapes)
    if (sh.property == prop)
      paint(m, sh);
  return m;
}

nlohmann::json vec_json(const Vec3 &v) { return {v[0], v[1], v[2]}; }

nlohmann::json solver_json(int iterations, double residual, double contraction)
{
  return {{"iterations", iterations}, {"residual", residual}, {"contraction", contraction}};
}

struct Writer
{
  std::filesystem::path dir;
  const Scenario &s;

  void field(const std::string &name, const Field &f) const
  {
    if (std::find(s.fields.begin(), s.fields.end(), name) == s.fields.end())
      return;
    std::filesystem::create_directories(dir / "fields");
    write_field((dir / "fields" / (name + ".bin")).string(), f, Precision::Complex128);
  }
  std::string path(const char *name) const { return (dir / name).string(); }
};

ScatteringOptions scattering_options(const Scenario &s)
{
  ScatteringOptions o;
  if (s.tol > 0)
    o.tol = s.tol;
  if (s.max_iter > 0)
    o.max_iter = s.max_iter;
  o.method = s.method;
  return o;
}

void run_acoustic(const Scenario &s, const Writer &w, nlohmann::json &out)
{
  const Grid g = make_grid(s);
  AcousticMedium m = uniform_medium(g, s.rho0, s.kappa0, s.omega);
  for (const ShapeSpec &sh : s.shapes)
  {
    if (sh.property == "rho")
      paint(m.rho, sh);
    else
      paint(m.kappa, sh);
  }
  PlaneWave pw{s.amplitude, s.direction, s.k0};
  AcousticSolution sol = solve_scattering(m, pw, scattering_options(s));
  out["solver"] = solver_json(sol.iterations, sol.residual, sol.contraction);
  out["k0"] = sol.k0;

  const double R = s.farfield_radius > 0 ? s.farfield_radius : default_farfield_radius(s);
  const std::vector<Vec3> dirs = spiral_directions(s.directions);
  FarFieldPattern pat = farfield_direct(sol, R, dirs);
  nlohmann::json samples = nlohmann::json::array();
  double id_err = 0.0;
  for (std::size_t i = 0; i < dirs.size(); i++)
  {
    nlohmann::json row = {{"direction", vec_json(dirs[i])}, {"P_inf", to_json(pat.amplitudes[i])}};
    if (s.identity)
    {
      cplx v = farfield_via_identity(sol, dirs[i]);
      row["P_inf_identity"] = to_json(v);
      id_err = std::max(id_err, std::abs(v - pat.amplitudes[i]));
    }
    samples.push_back(row);
  }
  out["farfield"] = {{"radius", R}, {"samples", samples}};
  if (s.identity)
    out["farfield"]["identity_mismatch"] = pat.max_abs() > 0 ? id_err / pat.max_abs() : id_err;

  FarFieldPattern rule = farfield_direct(sol, R);
  nlohmann::json power = {{"scattered", scattered_power(rule, sol.omega, sol.rho0)},
                          {"absorbed", absorbed_power(sol)}};
  if (sol.has_support)
    power["optical_theorem"] = to_json(optical_theorem_check(rule, sol));
  out["power"] = power;
  if (s.auxiliary_radius > 0.0)
    out["auxiliary"] = to_json(auxiliary_orthogonality_check(sol, s.auxiliary_radius));

  export_pattern(pat, w.path("pattern.csv"), w.path("pattern.json"));
  w.field("P_s", sol.P_s);
  w.field("v_s", sol.v_s);
  w.field("E_s", sol.E_s);
  w.field("J_s", sol.J_s);
}

void run_em(const Scenario &s, const Writer &w, nlohmann::json &out)
{
  const Grid g = make_grid(s);
  EmMedium m = uniform_em_medium(g, s.epsilon0, s.mu0, s.omega);
  m.epsilon = painted(s, g, "epsilon");
  m.mu = painted(s, g, "mu");
  EmPlaneWave pw{s.amplitude * s.e0, s.k0 * s.direction};
  EmSolution sol = solve_em_scattering(m, pw, scattering_options(s));
  out["solver"] = solver_json(sol.iterations, sol.residual, sol.contraction);
  out["k0"] = sol.k0;

  const double R = s.farfield_radius > 0 ? s.farfield_radius : default_farfield_radius(s);
  const std::vector<Vec3> dirs = spiral_directions(s.directions);
  EmFarField far = em_farfield_direct(sol, R, dirs);
  nlohmann::json samples = nlohmann::json::array();
  double id_err = 0.0;
  for (std::size_t i = 0; i < dirs.size(); i++)
  {
    nlohmann::json row = {{"direction", vec_json(dirs[i])}, {"e_inf", to_json(far.e_inf[i])}};
    if (s.identity)
    {
      Vec3c v = em_farfield_vector_via_identity(sol, dirs[i]);
      row["e_inf_identity"] = to_json(v);
      id_err = std::max(id_err, (v - far.e_inf[i]).norm());
    }
    samples.push_back(row);
  }
  out["farfield"] = {{"radius", R}, {"transversality", far.transversality}, {"samples", samples}};
  if (s.identity)
    out["farfield"]["identity_mismatch"] = far.max_abs() > 0 ? id_err / far.max_abs() : id_err;

  EmFarField rule = em_farfield_direct(sol, R, ShellOptions{});
  const double scattered = em_scattered_power(rule), absorbed = em_absorbed_power(sol);
  EmFarField fwd = em_farfield_direct(sol, R, std::vector<Vec3>{s.direction});
  const Vec3c e0 = pw.e0;
  const double extinction =
      2 * pi / (sol.omega * sol.mu0) * e0.dot(fwd.e_inf[0]).imag();  // Im e∞(d)·ē0
  out["power"] = {{"scattered", scattered},
                  {"absorbed", absorbed},
                  {"extinction", extinction},
                  {"mismatch", scattered + absorbed > 0
                                   ? std::abs(extinction - scattered - absorbed) /
                                         (scattered + absorbed)
                                   : 0.0}};
  if (s.auxiliary_radius > 0.0)
    out["auxiliary"] = to_json(em_auxiliary_orthogonality(sol, s.auxiliary_radius));

  export_em_pattern(far, w.path("pattern.csv"), w.path("pattern.json"));
  w.field("e_s", sol.e_s);
  w.field("h_s", sol.h_s);
  w.field("E_s", sol.E_s);
  w.field("J_s", sol.J_s);
}

void run_polarize(const Scenario &s, const Writer &w, nlohmann::json &out)
{
  const Grid g = make_grid(s);
  InclusionProblem p{painted(s, g, "epsilon"), s.epsilon0, s.amplitude * s.e0, s.omega};
  QuasistaticOptions o;
  if (s.tol > 0)
    o.tol = s.tol;
  if (s.max_iter > 0)
    o.max_iter = s.max_iter;
  QuasistaticSolution sol = solve_quasistatic(p, o);
  out["solver"] = solver_json(sol.iterations, sol.residual, sol.contraction);

  PolarizabilityResult r;
  r.b = dipole_moment(sol);
  QuasistaticOptions ot = o;
  ot.full_fields = false;
  r.alpha = polarizability_tensor(p, ot);
  r.absorbed_power = absorbed_power(r.alpha, p.e0, s.omega);
  out["polarizability"] = to_json(r);
  out["absorbed_power_volume"] = absorbed_power_volume(sol, s.omega);

  // dipole fit of the potential on a sphere halfway to the grid edge
  const double R = 0.5 * (material_reach(s) + half_width(s));
  SphereQuadrature quad = SphereQuadrature::with_points(200);
  std::vector<Vec3> pts;
  for (const Vec3 &n : quad.directions)
    pts.push_back(R * n);
  out["b_farfield"] = to_json(farfield_dipole_fit(quad, R, scattered_potential(sol, s.epsilon0, pts),
                                                  s.epsilon0));
  out["b_farfield_radius"] = R;

  w.field("e_s", sol.e_s);
  w.field("d_s", sol.d_s);
  w.field("phi_s", sol.phi_s);
}

ConductivityProblem conductivity(const Scenario &s, const Grid &g)
{
  ConductivityProblem p;
  p.sigma = painted(s, g, "sigma");
  p.domain = s.margin > 0 ? interior_box(g, s.margin) : whole_grid(g);
  p.reference_sigma = s.reference_sigma;
  if (s.tol > 0)
    p.tol = s.tol;
  if (s.max_iter > 0)
    p.max_iter = s.max_iter;
  return p;
}

void run_dtn(const Scenario &s, const Writer &w, nlohmann::json &out)
{
  const Grid g = make_grid(s);
  ConductivityProblem p = conductivity(s, g);
  DtnMap M = assemble_dtn(p);
  const Eigen::MatrixXcd &A = M.matrix;
  const double scale = A.cwiseAbs().maxCoeff();
  Eigen::MatrixXcd herm = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  out["dtn"] = {{"boundary_nodes", M.boundary_nodes.size()},
                {"reciprocity", (A - A.transpose()).norm() / A.norm()},
                {"max_row_sum", A.rowwise().sum().cwiseAbs().maxCoeff() / scale},
                {"min_eigenvalue", es.eigenvalues().minCoeff()},
                {"max_eigenvalue", es.eigenvalues().maxCoeff()}};
  nlohmann::json probes = nlohmann::json::array();
  const double h2 = g.spacing() * g.spacing();
  for (const std::string &name : s.boundary)
  {
    std::vector<cplx> v = boundary_samples(g, p.domain, polynomials.at(name));
    Eigen::Map<const Eigen::VectorXcd> vv(v.data(), Eigen::Index(v.size()));
    // boundary power ∮ V̄ σ∂V/∂n from the map against the volume power
    const double dtn_power = (vv.adjoint() * A * vv)(0, 0).real() * h2;
    const double vol = y_power(p, v);
    probes.push_back({{"boundary", name}, {"dtn_power", dtn_power}, {"volume_power", vol}});
  }
  out["dtn"]["probes"] = probes;
  export_dtn(M, w.path("dtn.csv"), w.path("dtn.json"));
}

void run_audit(const Scenario &s, const Writer &w, nlohmann::json &out)
{
  const Grid g = make_grid(s);
  ConductivityProblem p = conductivity(s, g);
  nlohmann::json audits = nlohmann::json::array();
  bool first = true;
  for (const std::string &name : s.boundary)
  {
    DirichletSolution sol = solve_dirichlet(p, boundary_samples(g, p.domain, polynomials.at(name)));
    const double vol = dissipated_power(p, sol), bnd = boundary_power(p, sol);
    audits.push_back({{"boundary", name},
                      {"volume_power", vol},
                      {"boundary_power", bnd},
                      {"discrepancy", vol != 0.0 ? std::abs(vol - bnd) / std::abs(vol)
                                                 : std::abs(bnd)},
                      {"solver", solver_json(sol.iterations, sol.update, sol.contraction)}});
    if (first)
    {
      w.field("V", sol.V);
      w.field("e", sol.e);
      w.field("j", sol.j);
      first = false;
    }
  }
  out["audits"] = audits;
}

Field random_vector_field(const Grid &g, std::mt19937_64 &rng)
{
  std::normal_distribution<double> nd;
  Field f = Field::vector(g);
  for (cplx &v : f.data())
    v = cplx(nd(rng), nd(rng));
  return f;
}

void run_project(const Scenario &s, std::uint64_t seed, nlohmann::json &out)
{
  const Grid g = make_grid(s);
  std::mt19937_64 rng(seed);
  const Region all = whole_grid(g);
  const Box dom = interior_box(g, std::max(s.margin, 1));
  DirichletPoisson solver(g, dom);
  double idem_f = 0, adj_f = 0, idem_d = 0, adj_d = 0;
  for (int t = 0; t < s.random_fields; t++)
  {
    Field p = random_vector_field(g, rng), q = random_vector_field(g, rng);
    const double pq = std::sqrt(std::abs(inner_product(p, p, all) * inner_product(q, q, all)));
    Field gp = gamma1_fourier(p);
    idem_f = std::max(idem_f, (gamma1_fourier(gp) - gp).norm() / gp.norm());
    adj_f = std::max(adj_f,
                     std::abs(inner_product(gp, q, all) - inner_product(p, gamma1_fourier(q), all)) /
                         pq);
    Field dp = gamma1_dirichlet(p, solver);
    idem_d = std::max(idem_d, (gamma1_dirichlet(dp, solver) - dp).norm() / dp.norm());
    adj_d = std::max(
        adj_d,
        std::abs(inner_product(dp, q, all) - inner_product(p, gamma1_dirichlet(q, solver), all)) /
            pq);
  }
  out["projections"] = {
      {"fields", s.random_fields},
      {"fourier", {{"idempotency", idem_f}, {"self_adjointness", adj_f}}},
      {"dirichlet", {{"domain", to_json(Region(dom))}, {"idempotency", idem_d}, {"self_adjointness", adj_d}}}};
}

}  // namespace

const char *kind_name(ScenarioKind k)
{
  for (const auto &[name, kind] : kinds)
    if (kind == k)
      return name.c_str();
  return "?";
}

nlohmann::json to_json(const std::vector<Diagnostic> &d)
{
  nlohmann::json j = nlohmann::json::array();
  for (const Diagnostic &x : d)
    j.push_back({{"path", x.path}, {"message", x.message}});
  return j;
}

double default_farfield_radius(const Scenario &s)
{
  const ShellOptions so;
  const double lo = (material_reach(s) + s.spacing) / (1.0 - so.shell_fraction);
  const double hi = (half_width(s) - s.spacing) / (1.0 + so.shell_fraction);
  return lo <= hi ? 0.5 * (lo + hi) : 0.0;
}

std::vector<Diagnostic> parse_scenario_text(const std::string &text, Scenario &out)
{
  Reader rd;
  out = Scenario{};
  YAML::Node root;
  try
  {
    root = YAML::Load(text);
  }
  catch (const YAML::Exception &e)
  {
    rd.error("", std::string("parse error: ") + e.what());
    return rd.diags;
  }
  parse_node(root, out, rd);
  return rd.diags;
}

std::vector<Diagnostic> load_scenario(const std::string &path, Scenario &out)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str(), out);
}

nlohmann::json run_scenario(const Scenario &s, const RunOptions &opts)
{
  namespace fs = std::filesystem;
  const fs::path dir = opts.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw IoError("cannot create output directory " + dir.string());

  nlohmann::json out;
  out["kind"] = kind_name(s.kind);
  out["name"] = s.name;
  out["grid"] = {{"dims", {s.dims[0], s.dims[1], s.dims[2]}}, {"spacing", s.spacing}};
  out["threads"] = fft::threads();

  Writer w{dir, s};
  switch (s.kind)
  {
  case ScenarioKind::Acoustic:
    run_acoustic(s, w, out);
    break;
  case ScenarioKind::Em:
    run_em(s, w, out);
    break;
  case ScenarioKind::Polarize:
    run_polarize(s, w, out);
    break;
  case ScenarioKind::BvpDtn:
    run_dtn(s, w, out);
    break;
  case ScenarioKind::Audit:
    run_audit(s, w, out);
    break;
  case ScenarioKind::Project:
  {
    const std::uint64_t seed = opts.seed ? *opts.seed : s.seed.value_or(0);
    out["seed"] = seed;
    run_project(s, seed, out);
    break;
  }
  }
  out["status"] = "ok";
  write_file_atomic((dir / "summary.json").string(), dump_json(out));
  return out;
}

}  // namespace atc
