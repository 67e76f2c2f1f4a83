#pragma once

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "cif/interpolants.hpp"
#include "cif/mesh.hpp"
#include "cif/model.hpp"

namespace cif {

/// Provenance of a trajectory: the coefficients, discretization and observer
/// it was produced with.
struct RunMetadata {
  ModelParams params;
  BoundaryCondition bc = BoundaryCondition::Mixed;
  InterpolantSpec spec;
  double k = 0.0;  ///< time step
  double T = 0.0;  ///< requested final time
};

/// Time series of a fully discrete run. Entry 0 is the initial state at t=0;
/// all series share one length. control_l2 holds ||I_h(Y^n)||_L2 (the applied
/// control magnitude is mu times that).
struct Trajectory {
  std::vector<double> times;
  std::vector<double> l2;
  std::vector<double> h1_semi;
  std::vector<double> l4;
  std::vector<double> linf;
  std::vector<double> control_l2;
  std::vector<int> newton_iters;  ///< 0 for the initial entry
  std::vector<std::pair<double, FemFunction>> snapshots;
  FemFunction final_state;
  RunMetadata meta;

  int steps() const { return static_cast<int>(times.size()) - 1; }
};

/// ||f||_L2 = sqrt(c^T M c) with the assembled mass matrix (exact for P1).
double l2_norm(const FemFunction& f);

/// |f|_H1 = sqrt(c^T A c) with the assembled stiffness matrix (exact).
double h1_seminorm(const FemFunction& f);

/// ||f||_L4 by 3-point Gauss per element (exact, degree-4 integrand).
double l4_norm(const FemFunction& f);

/// ||f||_Linf = max absolute nodal value (exact for piecewise-linear f).
double linf_norm(const FemFunction& f);

/// Exponential decay rate fitted to the L2 series.
struct DecayFit {
  double alpha_est = 0.0;     ///< minus the least-squares slope of log||Y^n|| vs t
  double t_begin = 0.0;
  double t_end = 0.0;
  double rms_residual = 0.0;  ///< RMS residual of the log-linear fit
};

/// Least-squares fit of log l2(t) over [t_begin, t_end]; the window defaults
/// to [0.2*T, T] to skip transients. Throws std::invalid_argument when the
/// series is not strictly positive on the window or has fewer than 2 samples.
DecayFit decay_rate_fit(const Trajectory& traj, std::optional<double> t_begin = {},
                        std::optional<double> t_end = {});

/// Step-by-step check of the guaranteed discrete decay bound
///   ||Y^n||^2 <= exp(-2 alpha t_n) ||Y^0||^2,
/// with a relative roundoff slack of 1e-12. Also evaluates the bound's
/// hypotheses: the stabilization conditions at scale h and both step-size
/// predicates exp(alpha k) < 1 + k*beta_i/2 with beta_2 = mu - 3nu - 2gamma
/// and beta_3 = mu - 2nu - 2gamma.
struct DecayCheckReport {
  bool ok = true;
  int first_violation_step = -1;
  int violation_count = 0;
  double worst_excess = 0.0;  ///< max over steps of lhs/rhs - 1 (0 if none)
  bool conditions_ok = false;
  bool step_condition_beta2 = false;
  bool step_condition_beta3 = false;
};

DecayCheckReport verify_discrete_decay(const Trajectory& traj, const ModelParams& p,
                                       double h, double alpha);

/// (t_n, ||I_h(Y^n)||_L2) pairs, ready for CSV emission.
std::vector<std::pair<double, double>> control_series(const Trajectory& traj);

/// CSV with header "t,l2_norm,h1_norm,control_l2,newton_iters".
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

/// CSV with header "t,l2_norm,h1_norm,l4_norm,control_l2,decay_bound_rhs";
/// decay_bound_rhs = exp(-2 alpha t) * l2(0)^2 bounds the squared L2 norm.
void write_diagnostics_csv(const Trajectory& traj, double alpha, std::ostream& out);

}  // namespace cif
