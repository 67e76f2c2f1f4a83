#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "cif/diagnostics.hpp"
#include "cif/stepper.hpp"

namespace cif {

enum class StudyAxis { Space, Time, Control };

/// One refinement rung: `resolution` is N (elements, spatial axes) or M
/// (steps, temporal axes).
struct ConvergenceRung {
  int resolution = 0;
  double error_l2 = 0.0;
  double error_linf = 0.0;
};

/// Refinement ladder with observed orders between consecutive rungs
/// (refinement factor 2 throughout).
struct ConvergenceReport {
  StudyAxis axis = StudyAxis::Space;
  /// For axis == Control: which discretization axis was refined.
  StudyAxis control_axis = StudyAxis::Space;
  std::vector<ConvergenceRung> ladder;
  std::vector<double> orders_l2;    ///< size ladder.size()-1
  std::vector<double> orders_linf;

  double mean_last_two_l2() const;    ///< NaN with fewer than 3 rungs
  double mean_last_two_linf() const;
};

/// CSV "resolution,error_l2,oc_l2,error_linf,oc_linf"; the first row carries
/// "--" in the order columns. Spatial resolutions print as "1/N".
void write_report_csv(const ConvergenceReport& report, std::ostream& out);

/// Fine-grid stand-in for the unknown exact solution.
struct ReferenceSolution {
  FemFunction final_state;
  double h_ref = 0.0;
  int M_ref = 0;
  double T = 0.0;
  ModelParams params;
  BoundaryCondition bc = BoundaryCondition::Mixed;
  InterpolantSpec spec;
};

using InitialData = std::function<double(double)>;

/// Full simulation at (1/N_ref, T/M_ref); the final-time state is kept with
/// its provenance. Deterministic: recomputing yields bit-identical results.
ReferenceSolution compute_reference(const ModelParams& p, BoundaryCondition bc,
                                    const InterpolantSpec& spec, const InitialData& y0,
                                    int N_ref, int M_ref, double T);

/// (L2, Linf) difference between a coarse-grid solution and the reference,
/// evaluating both piecewise-linear functions on the reference mesh: L2 via
/// the reference mass matrix, Linf over reference nodes. The coarse nodes
/// must be a subset of the reference nodes (nested ladders).
std::pair<double, double> grid_error(const FemFunction& coarse, const ReferenceSolution& ref);

/// log(e_coarse/e_fine) / log(ratio). Requires positive errors.
double observed_order(double e_coarse, double e_fine, double ratio = 2.0);

/// Final-time states of a refinement ladder (rungs run concurrently, results
/// ordered deterministically by rung).
struct LadderStates {
  StudyAxis axis = StudyAxis::Space;
  std::vector<int> resolutions;      ///< N per rung (Space) or M per rung (Time)
  std::vector<FemFunction> finals;
  int fixed = 0;                     ///< M_fixed (Space) or N_fixed (Time)
};

LadderStates run_spatial_ladder(const ModelParams& p, BoundaryCondition bc,
                                const InterpolantSpec& spec, const InitialData& y0,
                                const std::vector<int>& N_ladder, int M_fixed, double T);
LadderStates run_temporal_ladder(const ModelParams& p, BoundaryCondition bc,
                                 const InterpolantSpec& spec, const InitialData& y0,
                                 const std::vector<int>& M_ladder, int N_fixed, double T);

/// State-error report from precomputed ladder states.
ConvergenceReport state_report(const LadderStates& states, const ReferenceSolution& ref);

/// Control-input error report: the rung's interpolant is applied to both the
/// rung solution and the reference solution, and the L2/Linf differences of
/// the two observer outputs are tabulated.
ConvergenceReport control_report(const LadderStates& states, const ReferenceSolution& ref,
                                 const InterpolantSpec& spec);

/// State errors at T against `ref` for h in the ladder, M fixed.
ConvergenceReport spatial_study(const ModelParams& p, BoundaryCondition bc,
                                const InterpolantSpec& spec, const InitialData& y0,
                                const std::vector<int>& N_ladder, int M_fixed,
                                const ReferenceSolution& ref);

/// State errors at T against `ref` for M in the ladder, h fixed. The
/// reference must use the same mesh (h_ref = 1/N_fixed) and M_ref >= max M.
ConvergenceReport temporal_study(const ModelParams& p, BoundaryCondition bc,
                                 const InterpolantSpec& spec, const InitialData& y0,
                                 const std::vector<int>& M_ladder, int N_fixed,
                                 const ReferenceSolution& ref);

/// Control-input errors along one axis (StudyAxis::Space or StudyAxis::Time);
/// `ladder`/`fixed` are interpreted accordingly.
ConvergenceReport control_study(StudyAxis axis, const ModelParams& p, BoundaryCondition bc,
                                const InterpolantSpec& spec, const InitialData& y0,
                                const std::vector<int>& ladder, int fixed,
                                const ReferenceSolution& ref);

/// Acceptance bands on observed orders (mean of the last two rungs).
struct OrderBand {
  double lo = 0.0, hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
};
inline constexpr OrderBand kSpatialL2Band{1.75, 2.25};
inline constexpr OrderBand kSpatialLinfBand{1.70, 2.30};
inline constexpr OrderBand kTemporalBand{0.80, 1.20};
inline constexpr OrderBand kControlSpatialBand{1.75, 2.25};
inline constexpr OrderBand kControlTemporalBand{0.80, 1.20};

/// Independent cross-check: second-order centered finite differences in space
/// with the same backward-Euler/Newton stepping; Neumann-type ends use ghost
/// nodes, and the feedback term collocates the midpoint-rule observer with
/// second-order interface averaging. `grid_points` counts grid intervals
/// (nodes x_j = j/grid_points).
struct FdSolution {
  std::vector<double> x;
  std::vector<double> y;
};

FdSolution fd_oracle(const ModelParams& p, BoundaryCondition bc, const InitialData& y0,
                     int grid_points, int steps, double T);

}  // namespace cif
