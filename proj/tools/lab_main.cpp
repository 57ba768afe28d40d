#include <CLI11.hpp>

#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "clonelab/experiments.hpp"

using clonelab::Json;

namespace {

int dispatch(const std::string& name, const clonelab::LabConfig& cfg,
             const clonelab::RunContext& ctx) {
  using Runner = std::function<clonelab::RunOutcome(const clonelab::LabConfig&,
                                                    const clonelab::RunContext&)>;
  static const std::map<std::string, Runner> runners = {
      {"clone-r2n", clonelab::run_clone_r2n}, {"no-go", clonelab::run_no_go},
      {"approx", clonelab::run_approx},       {"points", clonelab::run_points},
      {"quantum-1d", clonelab::run_quantum},  {"selftest", clonelab::run_selftest}};

  clonelab::RunOutcome outcome = runners.at(name)(cfg, ctx);
  if (outcome.ok) {
    if (!ctx.quiet) std::cout << name << ": ok\n";
    return 0;
  }
  std::cerr << name << ": invariant failure\n";
  for (const std::string& v : outcome.violations) std::cerr << "  violated: " << v << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clonelab: a numerical laboratory for cloning maps on classical phase spaces"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  bool quiet = false;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "JSON config file (defaults are built in)")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory for reports and CSVs");
  app.add_option("--seed", seed, "override every experiment seed");
  app.add_flag("--quiet", quiet, "suppress progress output");

  for (const char* name : {"clone-r2n", "no-go", "approx", "points", "quantum-1d", "selftest"})
    app.add_subcommand(name);
  app.get_subcommand("clone-r2n")->description("exact linear cloning maps and their generator");
  app.get_subcommand("no-go")->description("winding-number certificates on cylinder and torus");
  app.get_subcommand("approx")->description("approximate-cloning search and its angular floor");
  app.get_subcommand("points")->description("finite point-collection transport suites");
  app.get_subcommand("quantum-1d")->description("one-dimensional subspace tensor regrouping");
  app.get_subcommand("selftest")->description("fast invariant sweep across every module");

  CLI11_PARSE(app, argc, argv);

  try {
    clonelab::LabConfig cfg;
    if (!config_path.empty()) cfg = clonelab::LabConfig::load(config_path);

    clonelab::RunContext ctx;
    ctx.out_dir = out_dir;
    ctx.quiet = quiet;
    ctx.seed_override = seed;

    return dispatch(app.get_subcommands().front()->get_name(), cfg, ctx);
  } catch (const clonelab::ConfigError& e) {
    std::cerr << Json{{"error", Json{{"type", "config"}, {"message", e.what()}}}}.dump()
              << "\n";
    return 2;
  } catch (const clonelab::DomainError& e) {
    std::cerr << Json{{"error", Json{{"type", "domain"}, {"message", e.what()}}}}.dump()
              << "\n";
    return 2;
  } catch (const clonelab::Error& e) {
    std::cerr << "invariant failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
