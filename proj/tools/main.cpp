#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "qc/cli.hpp"

namespace {

void print_error(const std::string& message) {
  std::printf("%s\n", nlohmann::json{{"error", message}}.dump().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  qc::RunConfig cfg;
  CLI::App app{"Mixed interior-penalty solver for the quad-curl problem on (0,1)^3"};
  app.set_config("--config", "", "INI config file; command-line flags win on conflict");

  app.add_option("--case", cfg.case_name, "Manufactured case, a or b")->capture_default_str();
  app.add_option("--k", cfg.k, "Method order, 1 or 2")->capture_default_str();
  app.add_option("--tau", cfg.tau, "Jump penalty (default 20 for k=1, 40 for k=2)");
  app.add_option("--variant", cfg.variant, "sym or nonsym")->capture_default_str();
  app.add_option("--levels", cfg.levels, "Refinement levels, comma separated")->delimiter(',');
  app.add_option("--n", cfg.n, "Generated-mesh refinement level");
  app.add_option("--mesh", cfg.mesh_path, "Gmsh MSH 2.2 mesh file");
  app.add_option("--tol", cfg.tol, "Solver residual tolerance")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Seed for sampling probes")->capture_default_str();
  app.add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
  app.add_flag("--dump-matrices", cfg.dump_matrices,
               "Write the assembled blocks in MatrixMarket form");

  app.add_subcommand("meshinfo", "Read or generate a mesh and report its topology");
  app.add_subcommand("solve", "Solve one manufactured case and report errors");
  app.add_subcommand("convergence", "Solve a halving sequence of levels and report orders");
  app.add_subcommand("inequality", "Estimate discrete inequality constants");
  for (CLI::App* sub : app.get_subcommands([](CLI::App*) { return true; })) sub->fallthrough();
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error(e.what());
    return 2;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    qc::validate(cfg);
    qc::run_command(cfg);
  } catch (const qc::ConfigError& e) {
    print_error(e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error(e.what());
    return 1;
  }
  return 0;
}
