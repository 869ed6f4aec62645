#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "actopt/optimize.hpp"

namespace actopt {

// Schema violation in a scenario file; `line` is 0 when no single line is
// responsible (e.g. a missing key).
struct ConfigError : std::runtime_error {
  int line;
  ConfigError(int line_, const std::string& msg) : std::runtime_error(msg), line(line_) {}
};

enum class ProblemKind { Position, Design, WorstCase, Scan };

// Parsed experiment description. The on-disk format is a key = value file
// with '#' comments; see the bundled configs/ directory for the schema.
struct Scenario {
  ProblemKind problem = ProblemKind::Design;
  bool is2d = false;
  // fem1d
  int n_elements = 200;
  std::string sigma_profile;  // catalog profile name; empty means constant
  double sigma_value = 0.01;
  // spectral2d
  int n_modes = 100;
  int grid = 128;
  // data and optimizer settings
  std::string initial_condition;  // catalog name, or "worst_case"
  double gamma = 1e-3;
  double c = 0.2;
  OptimizeConfig opt;
  // position problems
  double width = 0.2;
  double center0 = 0.8;
  // scan problems
  std::vector<double> centers;
  // level-set initial guess: "interval:a,b" (1D) or "disk:cx,cy,r" (2D)
  std::string psi0;
  std::string output_dir = "out";
};

// Parse and validate. Throws ConfigError with a line anchor on violations.
Scenario parse_scenario_file(const std::string& path);

// Run the scenario at `path`, writing run.json, history.csv, table.md and
// level-set snapshots into the output directory (the OUTPUT_DIR environment
// variable overrides the configured one). Returns 0 on success, 2 on schema
// violations (message on stderr), 3 on solver failures (partial artifacts).
int run_scenario(const std::string& path);

// Parse-and-report entry point behind `validate`: returns 0 when the file is
// schema-valid, 2 otherwise (message on stderr).
int validate_scenario(const std::string& path);

// Helpers shared with the tests: build the pieces a scenario describes.
SystemMatrices build_system(const Scenario& sc);
Eigen::VectorXd build_initial_condition(const Scenario& sc, const SystemMatrices& sys);
LevelSetField build_psi0(const Scenario& sc, const SystemMatrices& sys);

// CSV/markdown writers (deterministic, 6 significant digits).
void write_levelset_csv(const LevelSetField& f, const std::string& path);
void write_history_csv(const RunRecord& rec, const std::string& path);
void write_table_md(const RunRecord& rec, const std::string& path);
void write_trajectory_csv(const ClosedLoopTrajectory& traj, const std::string& path);
void write_run_json(const Scenario& sc, const RunRecord& rec, const std::string& path);

}  // namespace actopt
