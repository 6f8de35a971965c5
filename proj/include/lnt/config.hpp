#pragma once

#include <string>
#include <vector>

#include "lnt/domain.hpp"
#include "lnt/field_solver.hpp"

namespace lnt {

// Configuration shared by the CLI commands. Every field has a usable
// default; a config file overrides selectively.
struct RunConfig {
  Domain domain = Domain::ball({0, 0, 0}, 1.0);
  SolverOptions solver;
  double lambda = 1.0;
  double tol = 1e-4;  // bisection tolerance for the critical search
  int grid_res = 9;
  std::vector<double> mu_list = {0.2,  0.1414, 0.1,   0.0707,
                                 0.05, 0.0354, 0.025, 0.02};
  std::string out;  // output path; empty writes to stdout
};

// Parses the JSON configuration document. Unknown keys and malformed
// values are rejected.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// Full-precision decimal rendering (17 significant digits).
std::string format_full(double v);

// Write-then-rename; the destination never holds partial content.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace lnt
