#pragma once

#include <vector>

namespace cif {

/// Coefficients of the controlled reaction-diffusion model
///
///   y_t - nu*y_xx - gamma*y + delta*y^3 = -mu*I_h(y)   on (0,1),
///
/// where I_h is a finite-parameter observation operator. c_p is the
/// interpolation constant in the bound ||f - I_h f|| <= c_p * h * ||f||_H1.
///
/// gamma and delta are allowed to be zero so that the linearized (delta = 0)
/// and pure-diffusion (gamma = delta = 0) regimes used by the verification
/// harness are expressible; mu = 0 means uncontrolled.
struct ModelParams {
  double nu = 0.1;     ///< diffusion coefficient, > 0
  double gamma = 9.0;  ///< linear reaction coefficient, >= 0
  double delta = 9.0;  ///< cubic reaction coefficient, >= 0
  double mu = 20.0;    ///< feedback gain, >= 0
  double c_p = 1.0;    ///< interpolation constant, > 0

  /// Throws std::invalid_argument on out-of-range coefficients.
  void validate() const;
};

enum class BoundaryCondition {
  Mixed,      ///< y(0) = 0, y_x(1) = 0
  Dirichlet,  ///< y(0) = y(1) = 0
  Neumann,    ///< y_x(0) = y_x(1) = 0
};

/// Verdict of the sufficient stabilization conditions at observation scale h:
///
///   nu >= mu * c_p^2 * h^2 / 2   and   mu >= 2 * (gamma + nu).
///
/// When both hold, every decay rate 0 < alpha <= alpha_max is guaranteed for
/// the controlled dynamics. Failed conditions are reported, never thrown:
/// uncontrolled (mu = 0) runs are legitimate experiments.
struct ConditionReport {
  bool nu_lower_ok = false;  ///< nu >= mu*c_p^2*h^2/2
  bool mu_lower_ok = false;  ///< mu >= 2*(gamma + nu)
  double alpha_max = 0.0;    ///< max(0, (mu - 2*gamma - 2*nu)/2)
  double beta = 0.0;         ///< 2*nu - mu*c_p^2*h^2

  bool all_ok() const { return nu_lower_ok && mu_lower_ok; }
};

ConditionReport check_stabilization_conditions(const ModelParams& p, double h);

/// Smallest valid Laplacian mode index for a boundary condition
/// (0 for Mixed/Neumann, 1 for Dirichlet).
int first_mode_index(BoundaryCondition bc);

/// n-th Laplacian eigenvalue on (0,1):
///   Mixed     ((2n+1)*pi/2)^2, n >= 0
///   Dirichlet (n*pi)^2,        n >= 1
///   Neumann   (n*pi)^2,        n >= 0.
/// Throws std::invalid_argument for an invalid index.
double laplacian_eigenvalue(BoundaryCondition bc, int n);

/// Growth rate -nu*lambda_n + gamma of the n-th mode of the dynamics
/// linearized around y = 0.
double linearized_mode_rate(const ModelParams& p, BoundaryCondition bc, int n);

/// Number of linearized modes around y = 0 with strictly positive growth rate.
int unstable_mode_count(const ModelParams& p, BoundaryCondition bc);

/// Spatially constant steady states {0, +sqrt(gamma/delta), -sqrt(gamma/delta)}
/// of the uncontrolled dynamics. Requires delta > 0.
std::vector<double> steady_states(const ModelParams& p);

}  // namespace cif
