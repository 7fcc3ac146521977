#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>
#include "atc/acoustic.hpp"
#include "atc/grid.hpp"
#include "atc/material.hpp"

namespace atc
{

enum class ScenarioKind
{
  Project,
  BvpDtn,
  Polarize,
  Acoustic,
  Em,
  Audit
};

const char *kind_name(ScenarioKind k);

// One violation, addressed by its path in the config (e.g. "grid.spacing").
struct Diagnostic
{
  std::string path;
  std::string message;
};

nlohmann::json to_json(const std::vector<Diagnostic> &d);

// Primitive shape painted into one coefficient. Scalars, [re, im] pairs,
// 3-vectors (diagonal) and 3x3 matrices are accepted as values.
struct ShapeSpec
{
  enum Type
  {
    Ball,
    Box,
    HalfSpace
  } type = Ball;
  std::string property;  // sigma | epsilon | mu | rho | kappa
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  Vec3 lo = Vec3::Zero(), hi = Vec3::Zero();
  Vec3 normal = Vec3(0, 0, 1);
  double offset = 0.0;
  Mat3c value = Mat3c::Identity();
  Mixing mixing = Mixing::Arithmetic;
};

struct Scenario
{
  ScenarioKind kind = ScenarioKind::Acoustic;
  std::string name;

  Index3 dims{0, 0, 0};
  double spacing = 0.0;

  // background constants
  double sigma0 = 1.0, epsilon0 = 1.0, mu0 = 1.0, rho0 = 1.0, kappa0 = 1.0;
  double omega = 0.0;
  std::vector<ShapeSpec> shapes;

  // excitation
  cplx amplitude = 1.0;
  Vec3 direction = Vec3(0, 0, 1);
  double k0 = 0.0;  // 0: derived from omega
  Vec3c e0 = Vec3c(1, 0, 0);
  std::vector<std::string> boundary;  // bvp/audit boundary polynomials
  int random_fields = 20;
  int margin = 0;

  // solver
  double tol = 0.0;  // 0: module default
  int max_iter = 0;
  SolverMethod method = SolverMethod::Gmres;
  double reference_sigma = 0.0;

  // output
  int directions = 50;
  double farfield_radius = 0.0;  // 0: midway between the materials and the grid edge
  double auxiliary_radius = 0.0;  // 0: no auxiliary check
  bool identity = true;
  std::vector<std::string> fields;
  std::optional<std::uint64_t> seed;
};

// Schema and physics checks on a parsed config; reads nothing large and
// allocates no grids. Every violation is listed.
std::vector<Diagnostic> load_scenario(const std::string &path, Scenario &out);
std::vector<Diagnostic> parse_scenario_text(const std::string &text, Scenario &out);

struct RunOptions
{
  std::string output_dir = ".";
  std::optional<std::uint64_t> seed;
};

// Runs the scenario and writes summary.json, pattern.csv (scattering kinds)
// and fields/<name>.bin under the output directory. Each file is written
// atomically; the summary is written last and returned.
nlohmann::json run_scenario(const Scenario &s, const RunOptions &opts);

// Farfield radius used when none is configured.
double default_farfield_radius(const Scenario &s);

}  // namespace atc
