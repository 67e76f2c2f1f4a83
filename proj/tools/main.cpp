#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cif/version.hpp"
#include "cli.hpp"

namespace {

// One shared flag store: only the parsed subcommand's counts are consulted.
struct Flags {
  std::string config, preset, out, interpolant, bc, y0, rule;
  double mu = 0, nu = 0, gamma = 0, delta = 0, c_p = 0, T = 0, T_study = 0, alpha = 0;
  int N = 0, M = 0, fourier_modes = 0, observation_intervals = 0;
  std::vector<double> snapshots;
  int table_id = 0;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "Config file (sectioned key = value format)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--preset", f.preset,
                  "Parameter preset: example5.1|example5.2a|example5.2b|example5.3");
  cmd->add_option("--out", f.out, "Output directory (default: out)");
  cmd->add_option("--interpolant", f.interpolant, "Observer kind: nodal|volumes|fourier");
  cmd->add_option("--sample-rule", f.rule, "Nodal sample rule: left|midpoint|right");
  cmd->add_option("--fourier-modes", f.fourier_modes, "Fourier observer mode count");
  cmd->add_option("--observation-intervals", f.observation_intervals,
                  "Uniform observation intervals (0 = FEM partition)");
  cmd->add_option("--bc", f.bc, "Boundary condition: mixed|dirichlet|neumann");
  cmd->add_option("--y0", f.y0, "Initial condition, expression in x");
  cmd->add_option("--mu", f.mu, "Feedback gain");
  cmd->add_option("--nu", f.nu, "Diffusion coefficient");
  cmd->add_option("--gamma", f.gamma, "Linear reaction coefficient");
  cmd->add_option("--delta", f.delta, "Cubic reaction coefficient");
  cmd->add_option("--c-p", f.c_p, "Interpolation constant");
  cmd->add_option("--N", f.N, "Spatial elements");
  cmd->add_option("--M", f.M, "Time steps");
  cmd->add_option("--T", f.T, "Final time");
  cmd->add_option("--T-study", f.T_study, "Final time for convergence studies");
  cmd->add_option("--alpha", f.alpha, "Decay-bound rate (default: alpha_max)");
  cmd->add_option("--snapshots", f.snapshots, "State snapshot times");
}

cif::cli::ExperimentConfig build_config(const CLI::App* cmd, const Flags& f) {
  cif::cli::ExperimentConfig cfg;
  if (cmd->count("--preset")) cfg = cif::cli::preset(f.preset);
  if (cmd->count("--config")) cfg = cif::cli::load_config(f.config, cfg);
  if (cmd->count("--out")) cfg.out_dir = f.out;
  if (cmd->count("--interpolant")) cfg.interpolant = f.interpolant;
  if (cmd->count("--sample-rule")) cfg.sample_rule = f.rule;
  if (cmd->count("--fourier-modes")) cfg.fourier_modes = f.fourier_modes;
  if (cmd->count("--observation-intervals"))
    cfg.observation_intervals = f.observation_intervals;
  if (cmd->count("--bc")) {
    if (f.bc == "mixed")
      cfg.bc = cif::BoundaryCondition::Mixed;
    else if (f.bc == "dirichlet")
      cfg.bc = cif::BoundaryCondition::Dirichlet;
    else if (f.bc == "neumann")
      cfg.bc = cif::BoundaryCondition::Neumann;
    else
      throw CLI::ValidationError("--bc", "expected mixed|dirichlet|neumann");
  }
  if (cmd->count("--y0")) cfg.initial = f.y0;
  if (cmd->count("--mu")) cfg.params.mu = f.mu;
  if (cmd->count("--nu")) cfg.params.nu = f.nu;
  if (cmd->count("--gamma")) cfg.params.gamma = f.gamma;
  if (cmd->count("--delta")) cfg.params.delta = f.delta;
  if (cmd->count("--c-p")) cfg.params.c_p = f.c_p;
  if (cmd->count("--N")) cfg.N = f.N;
  if (cmd->count("--M")) cfg.M = f.M;
  if (cmd->count("--T")) cfg.T = f.T;
  if (cmd->count("--T-study")) cfg.T_study = f.T_study;
  if (cmd->count("--alpha")) cfg.alpha = f.alpha;
  if (cmd->count("--snapshots")) cfg.snapshot_times = f.snapshots;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Distributed feedback stabilization of the 1D Chafee-Infante equation:\n"
      "P1 finite elements, backward-Euler/Newton stepping, and finite-parameter\n"
      "observers (nodal values, volume averages, Fourier modes)."};
  app.set_version_flag("--version", std::string(cif::kVersion));
  app.require_subcommand(1);

  Flags f;
  CLI::App* simulate = app.add_subcommand("simulate", "Run one controlled/uncontrolled simulation");
  CLI::App* cspace = app.add_subcommand("converge-space", "Spatial refinement study of the state");
  CLI::App* ctime = app.add_subcommand("converge-time", "Temporal refinement study of the state");
  CLI::App* ccontrol =
      app.add_subcommand("converge-control", "Control-input refinement studies (both axes)");
  CLI::App* trepro =
      app.add_subcommand("table-repro", "Re-run a predefined results table and check its orders");
  CLI::App* stability =
      app.add_subcommand("stability-check", "Evaluate stabilization conditions and decay bound");
  CLI::App* modes = app.add_subcommand("modes", "List linearized modes and their growth rates");

  for (CLI::App* cmd : {simulate, cspace, ctime, ccontrol, trepro, stability, modes})
    add_common(cmd, f);
  trepro->add_option("table", f.table_id, "Table id: 1, 2 or 4")
      ->required()
      ->check(CLI::IsMember({1, 2, 4}));

  CLI11_PARSE(app, argc, argv);

  try {
    const CLI::App* cmd = app.get_subcommands().front();
    const cif::cli::ExperimentConfig cfg = build_config(cmd, f);
    const std::string& name = cmd->get_name();
    if (name == "simulate") return cif::cli::run_simulate(cfg, std::cout);
    if (name == "converge-space") return cif::cli::run_converge_space(cfg, std::cout);
    if (name == "converge-time") return cif::cli::run_converge_time(cfg, std::cout);
    if (name == "converge-control") return cif::cli::run_converge_control(cfg, std::cout);
    if (name == "table-repro") return cif::cli::run_table_repro(f.table_id, cfg, std::cout);
    if (name == "stability-check") return cif::cli::run_stability_check(cfg, std::cout);
    if (name == "modes") return cif::cli::run_modes(cfg, std::cout);
    std::cerr << "error: unknown subcommand " << name << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
