#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cif/mesh.hpp"
#include "cif/model.hpp"

namespace cif {

enum class SampleRule { Left, Midpoint, Right };

/// I_h(f) = sum_n f(x_n^*) chi_{J_n} with x_n^* picked by the sample rule.
/// Midpoint is the default: it minimizes the interpolation constant and makes
/// nodal values coincide with volume means on piecewise-linear functions.
struct NodalValues {
  SampleRule sample_rule = SampleRule::Midpoint;
};

/// I_h(f) = sum_n (mean of f over J_n) chi_{J_n}; an L2-orthogonal projection
/// onto piecewise constants, hence an L2 contraction.
struct FiniteVolumes {};

/// I_h(f) = orthogonal projection onto the first mode_count Laplacian
/// eigenfunctions of the run's boundary condition. mode_count = 0 is accepted
/// and denotes the zero operator (an empty projection).
struct FourierModes {
  int mode_count = 1;
};

/// Description of one finite-parameter observation operator. The observation
/// partition for the piecewise-constant kinds defaults to the FEM element
/// partition; a coarser partition whose breakpoints are mesh nodes may be
/// supplied instead.
struct InterpolantSpec {
  std::variant<NodalValues, FiniteVolumes, FourierModes> kind = NodalValues{};
  std::optional<std::vector<double>> partition;  ///< breakpoints 0 = b_0 < ... < b_m = 1

  static InterpolantSpec nodal(SampleRule rule = SampleRule::Midpoint);
  static InterpolantSpec volumes();
  static InterpolantSpec fourier(int mode_count);
  static std::vector<double> uniform_breakpoints(int m);

  InterpolantSpec with_partition(std::vector<double> breakpoints) const;

  bool is_nodal() const { return std::holds_alternative<NodalValues>(kind); }
  bool is_volumes() const { return std::holds_alternative<FiniteVolumes>(kind); }
  bool is_fourier() const { return std::holds_alternative<FourierModes>(kind); }

  /// Number of observed parameters: interval count for the piecewise-constant
  /// kinds (from the explicit partition, else the mesh), mode_count for
  /// Fourier modes.
  int controller_count(const MeshPartition& mesh) const;

  /// Length scale entering the stabilization conditions: the widest
  /// observation interval for piecewise-constant kinds, the mesh width for
  /// Fourier modes.
  double observation_scale(const MeshPartition& mesh) const;

  /// The observation breakpoints actually used with `mesh` (piecewise kinds
  /// only; throws for Fourier modes).
  std::vector<double> resolve_partition(const MeshPartition& mesh) const;

  std::string kind_name() const;  ///< "nodal", "volumes" or "fourier"
};

/// Piecewise-constant function: values[i] on [breakpoints[i], breakpoints[i+1]).
struct PiecewiseConstantFn {
  std::vector<double> breakpoints;
  std::vector<double> values;

  int interval_count() const { return static_cast<int>(values.size()); }
  double eval(double x) const;
  double l2_norm() const;  ///< exact: sqrt(sum values^2 * widths)
};

PiecewiseConstantFn apply_nodal(const InterpolantSpec& spec, const FemFunction& f);
PiecewiseConstantFn apply_nodal(const InterpolantSpec& spec,
                                const std::function<double(double)>& f);

PiecewiseConstantFn apply_volumes(const InterpolantSpec& spec, const FemFunction& f);
PiecewiseConstantFn apply_volumes(const InterpolantSpec& spec,
                                  const std::function<double(double)>& f);

/// Orthonormal Laplacian eigenfunction at basis position m (0-based):
///   Mixed     sqrt(2) sin((2m+1) pi x / 2)
///   Dirichlet sqrt(2) sin((m+1) pi x)
///   Neumann   1 for m = 0, sqrt(2) cos(m pi x) for m >= 1.
double eigenfunction(BoundaryCondition bc, int position, double x);

/// Result of a Fourier-mode projection: coefficients against the orthonormal
/// eigenfunction basis of `bc`.
struct FourierProjection {
  BoundaryCondition bc = BoundaryCondition::Mixed;
  std::vector<double> coefficients;

  double eval(double x) const;
  double l2_norm() const;  ///< = |coefficients|_2 (orthonormal basis)
};

FourierProjection apply_fourier(const InterpolantSpec& spec, const FemFunction& f);
FourierProjection apply_fourier(const InterpolantSpec& spec,
                                const std::function<double(double)>& f,
                                BoundaryCondition bc);

/// Applies whichever interpolant `spec` describes and returns the L2 norm of
/// the result (the recorded control magnitude ||I_h(y)||).
double interpolant_l2_norm(const InterpolantSpec& spec, const FemFunction& f);

/// A sample function with its exact derivative, for interpolation-bound
/// verification batteries.
struct SampleFunction {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> df;
};

struct InterpolationBoundReport {
  double max_ratio = 0.0;
  std::vector<double> ratios;  ///< one per sample, ||f - I_h f|| / (h ||f||_H1)
};

/// Empirically bounds ||f - I_h f||_L2 / (h * ||f||_H1) over a sample battery
/// using a uniform observation partition of width h; ||f||_H1 is the full H1
/// norm. For nodal values the ratio is expected to stay <= 1 (c_p = 1).
InterpolationBoundReport verify_interpolation_bound(
    const InterpolantSpec& spec, const std::vector<SampleFunction>& samples, double h);

}  // namespace cif
