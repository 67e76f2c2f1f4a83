#include "cif/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cif {

void ModelParams::validate() const {
  if (!(nu > 0.0)) throw std::invalid_argument("ModelParams: nu must be > 0");
  if (!(gamma >= 0.0)) throw std::invalid_argument("ModelParams: gamma must be >= 0");
  if (!(delta >= 0.0)) throw std::invalid_argument("ModelParams: delta must be >= 0");
  if (!(mu >= 0.0)) throw std::invalid_argument("ModelParams: mu must be >= 0");
  if (!(c_p > 0.0)) throw std::invalid_argument("ModelParams: c_p must be > 0");
}

ConditionReport check_stabilization_conditions(const ModelParams& p, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("check_stabilization_conditions: h must be > 0");
  p.validate();
  ConditionReport r;
  const double obs = p.mu * p.c_p * p.c_p * h * h;
  r.nu_lower_ok = p.nu >= 0.5 * obs;
  r.mu_lower_ok = p.mu >= 2.0 * (p.gamma + p.nu);
  r.alpha_max = std::max(0.0, 0.5 * (p.mu - 2.0 * p.gamma - 2.0 * p.nu));
  r.beta = 2.0 * p.nu - obs;
  return r;
}

int first_mode_index(BoundaryCondition bc) {
  return bc == BoundaryCondition::Dirichlet ? 1 : 0;
}

double laplacian_eigenvalue(BoundaryCondition bc, int n) {
  const double pi = std::numbers::pi;
  switch (bc) {
    case BoundaryCondition::Mixed:
      if (n < 0) throw std::invalid_argument("laplacian_eigenvalue: Mixed modes start at 0");
      {
        const double w = (2.0 * n + 1.0) * pi / 2.0;
        return w * w;
      }
    case BoundaryCondition::Dirichlet:
      if (n < 1) throw std::invalid_argument("laplacian_eigenvalue: Dirichlet modes start at 1");
      return n * pi * n * pi;
    case BoundaryCondition::Neumann:
      if (n < 0) throw std::invalid_argument("laplacian_eigenvalue: Neumann modes start at 0");
      return n * pi * n * pi;
  }
  throw std::invalid_argument("laplacian_eigenvalue: unknown boundary condition");
}

double linearized_mode_rate(const ModelParams& p, BoundaryCondition bc, int n) {
  return -p.nu * laplacian_eigenvalue(bc, n) + p.gamma;
}

int unstable_mode_count(const ModelParams& p, BoundaryCondition bc) {
  p.validate();
  // Rates decrease strictly in n; walk until the first non-positive one. The
  // cap is far beyond any physically sensible gamma/nu ratio.
  constexpr int kCap = 1 << 20;
  int count = 0;
  for (int n = first_mode_index(bc); n < kCap; ++n) {
    if (linearized_mode_rate(p, bc, n) > 0.0)
      ++count;
    else
      break;
  }
  return count;
}

std::vector<double> steady_states(const ModelParams& p) {
  if (!(p.delta > 0.0))
    throw std::invalid_argument("steady_states: requires delta > 0");
  const double s = std::sqrt(p.gamma / p.delta);
  return {0.0, s, -s};
}

}  // namespace cif
