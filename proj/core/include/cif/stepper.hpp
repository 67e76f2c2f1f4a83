#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cif/assembly.hpp"
#include "cif/diagnostics.hpp"
#include "cif/interpolants.hpp"
#include "cif/mesh.hpp"
#include "cif/model.hpp"

namespace cif {

struct StepperConfig {
  double k = 1e-3;                ///< time step
  double T = 1.0;                 ///< final time; the run takes ceil(T/k) steps
  double newton_abs_tol = 1e-12;  ///< on the Riesz L2 norm sqrt(r^T M^{-1} r)
  int newton_max_iters = 25;
  std::vector<double> snapshot_times;  ///< snapshotted at the nearest step time

  void validate() const;  ///< throws std::invalid_argument on bad values
};

/// Record of one Newton solve. `iterations` counts applied updates;
/// residual_norms[i] is the Riesz L2 residual norm after i updates, so a
/// converged initial guess yields iterations = 0.
struct NewtonReport {
  int iterations = 0;
  std::vector<double> residual_norms;
  bool converged = false;
};

/// Sufficient per-step solvability condition k*(gamma + mu*c_p^2*h^2/2) < 1,
/// with h the observation length scale. The condition is sufficient, not
/// necessary: violations downgrade to a warning in simulate().
bool step_size_guard(const ModelParams& p, double h, double k);

/// Matrices of the scheme on a fixed mesh/boundary condition. M and A are raw
/// (nu, gamma, delta, mu all applied by the stepper); B is absent for
/// uncontrolled runs.
struct AssembledSystem {
  MeshPtr mesh;
  BoundaryCondition bc = BoundaryCondition::Mixed;
  TridiagonalMatrix M, A;
  std::optional<FeedbackOperator> B;
};

/// Assembles M, A and (when spec != nullptr) the feedback operator.
AssembledSystem assemble_system(MeshPtr mesh, BoundaryCondition bc,
                                const InterpolantSpec* spec);

class NewtonFailure : public std::runtime_error {
 public:
  NewtonFailure(const std::string& what, NewtonReport report, int step_index = -1);

  const NewtonReport& report() const { return report_; }
  int step_index() const { return step_index_; }  ///< -1 outside simulate()

 private:
  NewtonReport report_;
  int step_index_;
};

/// One backward-Euler step: solves
///   M (Y - Y_prev)/k + nu A Y - gamma M Y + delta c(Y) + mu B Y = 0
/// by Newton's method with Jacobian M/k + nu A - gamma M + delta J_c(Y) + mu B
/// and initial guess Y_prev. Banded systems factorize directly; Fourier
/// feedback solves through the Woodbury identity. The effective tolerance is
/// max(newton_abs_tol, floor), where floor bounds the rounding noise of the
/// residual evaluation itself — at fine resolutions the terms nu A Y and
/// M Y / k grow like h^-2 and k^-1 and their cancellation cannot produce a
/// residual smaller than a few ulps of their magnitude. Throws NewtonFailure
/// when the residual does not reach the effective tolerance within
/// newton_max_iters updates.
FemFunction backward_euler_step(const FemFunction& y_prev, const ModelParams& p,
                                const AssembledSystem& sys, const StepperConfig& cfg,
                                NewtonReport* report = nullptr);

/// Runs ceil(T/k) backward-Euler steps from y0h, recording per step the L2,
/// H1-seminorm, L4 and Linf state norms, the control magnitude ||I_h(Y^n)||
/// and the Newton iteration count. A failed step-size guard emits one stderr
/// warning. Identical inputs produce bit-identical trajectories.
Trajectory simulate(const FemFunction& y0h, const ModelParams& p,
                    const InterpolantSpec& spec, BoundaryCondition bc,
                    const StepperConfig& cfg);

}  // namespace cif
