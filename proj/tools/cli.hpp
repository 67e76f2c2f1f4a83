#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cif/convergence.hpp"

namespace cif::cli {

/// Everything one run needs, in layering order: built-in defaults, then an
/// optional preset, then an optional config file, then command-line overrides.
struct ExperimentConfig {
  ModelParams params;
  BoundaryCondition bc = BoundaryCondition::Mixed;

  std::string interpolant = "nodal";     ///< nodal | volumes | fourier
  std::string sample_rule = "midpoint";  ///< left | midpoint | right
  int fourier_modes = 1;
  int observation_intervals = 0;  ///< 0 = observe on the FEM element partition

  std::string initial = "x(1-x)";  ///< initial condition, expression in x

  int N = 100;    ///< spatial elements
  int M = 1000;   ///< time steps
  double T = 5.0; ///< final time

  // Study parameters (converge-* and table-repro subcommands).
  std::vector<int> space_ladder = {10, 20, 40, 80, 160, 320};
  int N_ref = 1280;
  int M_fixed = 1050;
  std::vector<int> time_ladder = {100, 200, 400, 800, 1600, 3200};
  int M_ref = 102400;
  int N_fixed = 200;
  double T_study = 1.0;

  double alpha = -1.0;  ///< decay-bound rate; negative means "use alpha_max"
  std::vector<double> snapshot_times;
  std::string out_dir = "out";
  std::string study = "simulate";  ///< recorded subcommand (informational)

  InterpolantSpec interpolant_spec() const;  ///< throws on unknown names
  InitialData initial_data() const;          ///< parses `initial`
  double alpha_or_max(double h) const;
};

/// Named parameter sets: example5.1, example5.2a, example5.2b, example5.3.
/// Throws std::invalid_argument for unknown names.
ExperimentConfig preset(const std::string& name);

/// Parses the flat key=value config format (section headers in brackets,
/// '#'/';' comments). Unknown sections or keys and malformed values throw
/// std::invalid_argument with "<source>:<line>: message" diagnostics.
/// Parsing starts from `base`, so partial files override selectively.
ExperimentConfig parse_config(std::istream& in, const std::string& source_name,
                              ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Serializes every field; parse_config(serialize_config(c)) reproduces c
/// bit-identically (doubles are written with 17 significant digits).
std::string serialize_config(const ExperimentConfig& cfg, const std::string& subcommand);

/// Writes via a temporary file plus rename: the target is complete or absent.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Subcommand drivers. Each writes its artifacts (CSVs plus manifest.cfg) into
// cfg.out_dir, logs human-readable progress, and returns the process exit
// status (0 = success and, for table-repro and stability-check, all checks
// passed).
int run_simulate(const ExperimentConfig& cfg, std::ostream& log);
int run_converge_space(const ExperimentConfig& cfg, std::ostream& log);
int run_converge_time(const ExperimentConfig& cfg, std::ostream& log);
int run_converge_control(const ExperimentConfig& cfg, std::ostream& log);
int run_table_repro(int table_id, const ExperimentConfig& cfg, std::ostream& log);
int run_stability_check(const ExperimentConfig& cfg, std::ostream& log);
int run_modes(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace cif::cli
