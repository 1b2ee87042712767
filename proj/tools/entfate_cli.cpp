// Command-line front end for the experiment drivers.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "entfate/errors.hpp"
#include "entfate/experiments.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kNumericalFailure = 2, kVerificationFailure = 3 };

void log_line(const std::string& msg) { std::cerr << "[entfate] " << msg << std::endl; }

nlohmann::json crossing_json(const entfate::ZeroCrossing& z) {
  using K = entfate::ZeroCrossing::Kind;
  if (z.kind == K::found) return z.s;
  return z.kind == K::none ? "none" : "beyond_range";
}

int run(const entfate::RunConfig& cfg) {
  using namespace entfate;
  if (cfg.subcommand == "fermi-verify") {
    RunContext ctx(cfg);
    FermiVerifyResult res;
    {
      RunContext::Stage stage(ctx, "fermi_verify");
      res = fermi_verify(ctx.config());
    }
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream(cfg.out_dir / "fermi_verify.json") << res.report.dump(2) << '\n';
    std::ofstream(cfg.out_dir / "metadata.json") << ctx.metadata({{"pass", res.pass}}).dump(2) << '\n';
    if (!res.pass) {
      for (const auto& f : res.report["failures"]) {
        log_line("verification failed for seed index " + f["seed_index"].dump());
      }
      log_line("analytic cases: " + res.report["analytic"].dump());
      return kVerificationFailure;
    }
    log_line("all " + std::to_string(cfg.seeds) + " seeds passed for m=" + std::to_string(cfg.modes));
    return kOk;
  }

  RunContext ctx(cfg);
  if (cfg.subcommand == "field-sweep") {
    const auto res = field_sweep(ctx);
    write_outputs(ctx, "field_sweep", res.table, {{"h2_star", crossing_json(res.h2_star)}});
  } else if (cfg.subcommand == "temp-sweep") {
    const auto res = temp_sweep(ctx);
    const auto th = res.thresholds.to_json();
    write_outputs(ctx, "temp_sweep", res.table, {{"thresholds", th}});
    std::ofstream(cfg.out_dir / "thresholds.json") << th.dump(2) << '\n';
    log_line("thresholds " + th.dump());
  } else if (cfg.subcommand == "quench") {
    write_outputs(ctx, "quench", quench(ctx));
  } else if (cfg.subcommand == "separation") {
    write_outputs(ctx, "separation", separation(ctx));
  } else if (cfg.subcommand == "frh") {
    write_outputs(ctx, "frh", frh(ctx));
  } else {
    throw DomainError("unknown subcommand '" + cfg.subcommand + "'");
  }
  log_line("wrote " + cfg.out_dir.string() + " (" + std::to_string(ctx.diagonalizations()) +
           " diagonalizations)");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  entfate::RunConfig cfg;
  CLI::App app{"Entanglement detectors on the transverse-field Ising icosahedron"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_config("--config", "", "Flat key=value file mirroring the long flags");
  app.require_subcommand(1);

  std::string out = ".";
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Global RNG seed")->capture_default_str();
  app.add_option("--h", cfg.h, "Transverse field for fixed-h runs")->capture_default_str();
  app.add_option("--h-min", cfg.h_grid.lo)->capture_default_str();
  app.add_option("--h-max", cfg.h_grid.hi)->capture_default_str();
  app.add_option("--h-step", cfg.h_grid.step)->capture_default_str();
  app.add_option("--t-min", cfg.t_grid.lo, "Lowest temperature")->capture_default_str();
  app.add_option("--t-max", cfg.t_grid.hi, "Highest temperature")->capture_default_str();
  app.add_option("--t-points", cfg.t_grid.points, "Log-spaced temperature count")->capture_default_str();
  app.add_option("--time-min", cfg.time_grid.lo)->capture_default_str();
  app.add_option("--time-max", cfg.time_grid.hi)->capture_default_str();
  app.add_option("--time-step", cfg.time_grid.step)->capture_default_str();
  app.add_option("--restarts", cfg.geometric.restarts, "Starts per term count for D_geom")
      ->capture_default_str();
  app.add_option("--max-iterations", cfg.geometric.max_iterations, "BFGS iteration cap for D_geom")
      ->capture_default_str();
  app.add_option("--w-restarts", cfg.w.restarts, "Starts for the W maximization")->capture_default_str();
  app.add_option("--w-max-evals", cfg.w.max_iterations, "Simplex evaluation cap per W start")
      ->capture_default_str();
  bool no_geometric = false;
  app.add_flag("--no-geometric", no_geometric, "Leave the D_geom column empty");
  app.add_option("--pattern", cfg.pattern, "Quench initial state, 12 chars of 0/1 (0 = up)")
      ->capture_default_str();
  app.add_option("--pair", cfg.pair, "Adjacent pair, e.g. --pair 1 2")->expected(2);
  app.add_option("--face", cfg.face, "Triangular face, e.g. --face 1 2 3")->expected(3);
  app.add_option("--m", cfg.modes, "Fermionic modes (3 or 4)")->capture_default_str();
  app.add_option("--seeds", cfg.seeds, "Fuzzed ensembles for fermi-verify")->capture_default_str();

  for (const char* name : {"field-sweep", "temp-sweep", "quench", "separation", "frh", "fermi-verify"}) {
    app.add_subcommand(name)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  cfg.out_dir = out;
  cfg.compute_geometric = !no_geometric;

  try {
    entfate::RunContext check(cfg);  // validates grids, selections and optimizer settings
  } catch (const entfate::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  try {
    return run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}
