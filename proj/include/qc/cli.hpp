#ifndef QC_CLI_HPP
#define QC_CLI_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace qc {

// A configuration error: bad flag values, impossible level lists, missing
// mesh files.  The driver maps these to exit code 2, runtime failures to 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;          // meshinfo | solve | convergence | inequality
  std::string case_name = "a";  // manufactured case: a (full) or b (div-free load)
  int k = 1;
  double tau = -1.0;  // negative requests the default for k
  std::string variant = "sym";
  std::vector<int> levels;  // refinement levels for convergence and inequality
  int n = 0;                // single generated-mesh level for solve and meshinfo
  std::string mesh_path;    // Gmsh file, used instead of a generated mesh
  double tol = 1e-10;
  unsigned seed = 42;
  std::string out_dir = ".";
  bool dump_matrices = false;
};

// Checks invariants and fills defaults (tau).  Throws ConfigError.
void validate(RunConfig& cfg);

// Runs the configured command and writes its CSV/JSON outputs into
// cfg.out_dir.  Throws ConfigError for problems detectable up front
// (missing mesh file) and std::runtime_error for pipeline failures.
void run_command(const RunConfig& cfg);

}  // namespace qc

#endif
