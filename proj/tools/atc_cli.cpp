// atc run <config> | atc validate <config>
//
// Exit codes: 0 success, 2 invalid config or medium, 3 solver did not
// converge, 4 I/O failure. Failures print one JSON object on stderr.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include "atc/errors.hpp"
#include "atc/fft.hpp"
#include "atc/json_format.hpp"
#include "atc/scenario.hpp"

namespace
{

int fail(int code, const std::string &kind, const std::string &message,
         nlohmann::json extra = nlohmann::json::object())
{
  extra["error"] = kind;
  extra["message"] = message;
  extra["exit_code"] = code;
  std::cerr << atc::dump_json(extra, -1);
  return code;
}

int thread_count(int flag)
{
  if (flag > 0)
    return flag;
  if (const char *env = std::getenv("ATC_THREADS"))
  {
    int n = std::atoi(env);
    if (n > 0)
      return n;
  }
  return 1;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Composite-theory solvers: projections, DtN maps, polarizability, scattering"};
  app.require_subcommand(1);
  std::string config, output_dir = ".";
  int threads = 0;
  std::uint64_t seed = 0;

  CLI::App *run = app.add_subcommand("run", "Run a scenario and write its outputs");
  run->add_option("config", config, "Scenario file (YAML or JSON)")->required();
  run->add_option("--output-dir", output_dir, "Directory for summary.json, pattern.csv, fields/");
  CLI::Option *seed_opt = run->add_option("--seed", seed, "Seed for randomized scenarios");
  run->add_option("--threads", threads, "Thread count (default: ATC_THREADS or 1)")
      ->check(CLI::PositiveNumber);

  CLI::App *validate = app.add_subcommand("validate", "Check a scenario and list every problem");
  validate->add_option("config", config, "Scenario file (YAML or JSON)")->required();

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp &e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError &e)
  {
    return fail(2, "usage", e.what());
  }

  try
  {
    atc::Scenario s;
    std::vector<atc::Diagnostic> diags = atc::load_scenario(config, s);
    if (*validate)
    {
      nlohmann::json j = {{"config", config},
                          {"valid", diags.empty()},
                          {"diagnostics", atc::to_json(diags)}};
      std::cout << atc::dump_json(j);
      return 0;
    }
    if (!diags.empty())
      return fail(2, "validation", "config has " + std::to_string(diags.size()) + " problem(s)",
                  {{"diagnostics", atc::to_json(diags)}});

    atc::fft::set_threads(thread_count(threads));
    atc::RunOptions opts;
    opts.output_dir = output_dir;
    if (*seed_opt)
      opts.seed = seed;
    atc::run_scenario(s, opts);
    return 0;
  }
  catch (const atc::NonConvergence &e)
  {
    return fail(3, "nonconvergence", e.what(),
                {{"iterations", e.iterations},
                 {"residual", e.residual},
                 {"contraction", e.contraction}});
  }
  catch (const atc::IoError &e)
  {
    return fail(4, "io", e.what());
  }
  catch (const std::filesystem::filesystem_error &e)
  {
    return fail(4, "io", e.what());
  }
  catch (const atc::InvalidArgument &e)
  {
    return fail(2, "invalid", e.what());
  }
  catch (const atc::ResolutionError &e)
  {
    return fail(2, "resolution", e.what());
  }
  catch (const atc::UnsupportedMedium &e)
  {
    return fail(2, "unsupported_medium", e.what());
  }
  catch (const std::exception &e)
  {
    return fail(2, "invalid", e.what());
  }
}
