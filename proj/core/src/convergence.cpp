#include "cif/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "cif/linalg.hpp"

namespace cif {

namespace {

double mean_last_two(const std::vector<double>& orders) {
  if (orders.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return 0.5 * (orders[orders.size() - 1] + orders[orders.size() - 2]);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

double ConvergenceReport::mean_last_two_l2() const { return mean_last_two(orders_l2); }
double ConvergenceReport::mean_last_two_linf() const { return mean_last_two(orders_linf); }

void write_report_csv(const ConvergenceReport& report, std::ostream& out) {
  const bool spatial_resolution =
      report.axis == StudyAxis::Space ||
      (report.axis == StudyAxis::Control && report.control_axis == StudyAxis::Space);
  out << "resolution,error_l2,oc_l2,error_linf,oc_linf\n";
  for (std::size_t i = 0; i < report.ladder.size(); ++i) {
    const auto& rung = report.ladder[i];
    if (spatial_resolution)
      out << "1/" << rung.resolution;
    else
      out << rung.resolution;
    out << ',' << fmt(rung.error_l2) << ',';
    out << (i == 0 ? "--" : fmt(report.orders_l2[i - 1])) << ',';
    out << fmt(rung.error_linf) << ',';
    out << (i == 0 ? "--" : fmt(report.orders_linf[i - 1])) << '\n';
  }
}

ReferenceSolution compute_reference(const ModelParams& p, BoundaryCondition bc,
                                    const InterpolantSpec& spec, const InitialData& y0,
                                    int N_ref, int M_ref, double T) {
  if (M_ref < 1) throw std::invalid_argument("compute_reference: M_ref must be >= 1");
  const MeshPtr mesh = share(uniform_partition(N_ref));
  const FemFunction y0h = project_initial(y0, mesh, bc);
  StepperConfig cfg;
  cfg.k = T / M_ref;
  cfg.T = T;
  Trajectory traj = simulate(y0h, p, spec, bc, cfg);

  ReferenceSolution ref;
  ref.final_state = std::move(traj.final_state);
  ref.h_ref = mesh->h;
  ref.M_ref = M_ref;
  ref.T = T;
  ref.params = p;
  ref.bc = bc;
  ref.spec = spec;
  return ref;
}

std::pair<double, double> grid_error(const FemFunction& coarse, const ReferenceSolution& ref) {
  const MeshPartition& rmesh = *ref.final_state.mesh;
  const MeshPartition& cmesh = *coarse.mesh;
  if (coarse.bc != ref.bc)
    throw std::invalid_argument("grid_error: boundary conditions differ");
  for (double xc : cmesh.nodes) {
    auto it = std::lower_bound(rmesh.nodes.begin(), rmesh.nodes.end(), xc - 1e-12);
    if (it == rmesh.nodes.end() || std::abs(*it - xc) > 1e-12)
      throw std::invalid_argument("grid_error: coarse nodes must nest into the reference mesh");
  }

  const auto rv = ref.final_state.full_values();
  std::vector<double> d(rmesh.num_nodes());
  for (int j = 0; j < rmesh.num_nodes(); ++j) d[j] = eval(coarse, rmesh.nodes[j]) - rv[j];

  double l2_sq = 0.0, linf = 0.0;
  for (int e = 0; e < rmesh.num_elements(); ++e) {
    const double he = rmesh.element_lengths[e];
    const double a = d[e], b = d[e + 1];
    l2_sq += he * (a * a + a * b + b * b) / 3.0;
  }
  for (double v : d) linf = std::max(linf, std::abs(v));
  return {std::sqrt(l2_sq), linf};
}

double observed_order(double e_coarse, double e_fine, double ratio) {
  if (!(e_coarse > 0.0) || !(e_fine > 0.0))
    throw std::invalid_argument("observed_order: errors must be positive");
  if (!(ratio > 1.0)) throw std::invalid_argument("observed_order: ratio must exceed 1");
  return std::log(e_coarse / e_fine) / std::log(ratio);
}

namespace {

FemFunction run_one(const ModelParams& p, BoundaryCondition bc, const InterpolantSpec& spec,
                    const InitialData& y0, int N, int M, double T) {
  const MeshPtr mesh = share(uniform_partition(N));
  const FemFunction y0h = project_initial(y0, mesh, bc);
  StepperConfig cfg;
  cfg.k = T / M;
  cfg.T = T;
  return simulate(y0h, p, spec, bc, cfg).final_state;
}

LadderStates run_ladder(StudyAxis axis, const ModelParams& p, BoundaryCondition bc,
                        const InterpolantSpec& spec, const InitialData& y0,
                        const std::vector<int>& ladder, int fixed, double T) {
  if (ladder.empty()) throw std::invalid_argument("refinement ladder must not be empty");
  LadderStates states;
  states.axis = axis;
  states.resolutions = ladder;
  states.fixed = fixed;

  std::vector<std::future<FemFunction>> futures;
  futures.reserve(ladder.size());
  for (int r : ladder) {
    const int N = axis == StudyAxis::Space ? r : fixed;
    const int M = axis == StudyAxis::Space ? fixed : r;
    futures.push_back(std::async(std::launch::async, run_one, p, bc, spec, y0, N, M, T));
  }
  states.finals.reserve(ladder.size());
  for (auto& f : futures) states.finals.push_back(f.get());
  return states;
}

}  // namespace

LadderStates run_spatial_ladder(const ModelParams& p, BoundaryCondition bc,
                                const InterpolantSpec& spec, const InitialData& y0,
                                const std::vector<int>& N_ladder, int M_fixed, double T) {
  return run_ladder(StudyAxis::Space, p, bc, spec, y0, N_ladder, M_fixed, T);
}

LadderStates run_temporal_ladder(const ModelParams& p, BoundaryCondition bc,
                                 const InterpolantSpec& spec, const InitialData& y0,
                                 const std::vector<int>& M_ladder, int N_fixed, double T) {
  return run_ladder(StudyAxis::Time, p, bc, spec, y0, M_ladder, N_fixed, T);
}

ConvergenceReport state_report(const LadderStates& states, const ReferenceSolution& ref) {
  ConvergenceReport report;
  report.axis = states.axis;
  report.control_axis = states.axis;
  for (std::size_t i = 0; i < states.finals.size(); ++i) {
    const auto [e2, einf] = grid_error(states.finals[i], ref);
    report.ladder.push_back({states.resolutions[i], e2, einf});
  }
  for (std::size_t i = 1; i < report.ladder.size(); ++i) {
    report.orders_l2.push_back(
        observed_order(report.ladder[i - 1].error_l2, report.ladder[i].error_l2));
    report.orders_linf.push_back(
        observed_order(report.ladder[i - 1].error_linf, report.ladder[i].error_linf));
  }
  return report;
}

namespace {

// L2 and Linf distance between two observer outputs of one interpolant kind.
std::pair<double, double> observer_error(const InterpolantSpec& rung_spec,
                                         const FemFunction& rung_final,
                                         const FemFunction& ref_final) {
  if (rung_spec.is_fourier()) {
    const auto cr = apply_fourier(rung_spec, rung_final);
    const auto cf = apply_fourier(rung_spec, ref_final);
    std::vector<double> dc(cr.coefficients.size());
    for (std::size_t m = 0; m < dc.size(); ++m) dc[m] = cr.coefficients[m] - cf.coefficients[m];
    double l2 = 0.0;
    for (double c : dc) l2 += c * c;
    FourierProjection diff{cr.bc, dc};
    double linf = 0.0;
    constexpr int kGrid = 2048;
    for (int g = 0; g <= kGrid; ++g)
      linf = std::max(linf, std::abs(diff.eval(static_cast<double>(g) / kGrid)));
    return {std::sqrt(l2), linf};
  }

  const auto a = rung_spec.is_nodal() ? apply_nodal(rung_spec, rung_final)
                                      : apply_volumes(rung_spec, rung_final);
  const auto b = rung_spec.is_nodal() ? apply_nodal(rung_spec, ref_final)
                                      : apply_volumes(rung_spec, ref_final);
  double l2_sq = 0.0, linf = 0.0;
  for (int i = 0; i < a.interval_count(); ++i) {
    const double w = a.breakpoints[i + 1] - a.breakpoints[i];
    const double d = a.values[i] - b.values[i];
    l2_sq += d * d * w;
    linf = std::max(linf, std::abs(d));
  }
  return {std::sqrt(l2_sq), linf};
}

}  // namespace

ConvergenceReport control_report(const LadderStates& states, const ReferenceSolution& ref,
                                 const InterpolantSpec& spec) {
  ConvergenceReport report;
  report.axis = StudyAxis::Control;
  report.control_axis = states.axis;
  for (std::size_t i = 0; i < states.finals.size(); ++i) {
    InterpolantSpec rung_spec = spec;
    if (!spec.is_fourier() && !spec.partition)
      rung_spec = spec.with_partition(states.finals[i].mesh->nodes);
    const auto [e2, einf] = observer_error(rung_spec, states.finals[i], ref.final_state);
    report.ladder.push_back({states.resolutions[i], e2, einf});
  }
  for (std::size_t i = 1; i < report.ladder.size(); ++i) {
    report.orders_l2.push_back(
        observed_order(report.ladder[i - 1].error_l2, report.ladder[i].error_l2));
    report.orders_linf.push_back(
        observed_order(report.ladder[i - 1].error_linf, report.ladder[i].error_linf));
  }
  return report;
}

ConvergenceReport spatial_study(const ModelParams& p, BoundaryCondition bc,
                                const InterpolantSpec& spec, const InitialData& y0,
                                const std::vector<int>& N_ladder, int M_fixed,
                                const ReferenceSolution& ref) {
  for (int N : N_ladder)
    if (!(ref.h_ref < 1.0 / N))
      throw std::invalid_argument("spatial_study: reference mesh must be finer than the ladder");
  const auto states = run_spatial_ladder(p, bc, spec, y0, N_ladder, M_fixed, ref.T);
  return state_report(states, ref);
}

ConvergenceReport temporal_study(const ModelParams& p, BoundaryCondition bc,
                                 const InterpolantSpec& spec, const InitialData& y0,
                                 const std::vector<int>& M_ladder, int N_fixed,
                                 const ReferenceSolution& ref) {
  if (ref.final_state.mesh->num_elements() != N_fixed)
    throw std::invalid_argument("temporal_study: reference must use the ladder mesh");
  for (int M : M_ladder)
    if (ref.M_ref < M)
      throw std::invalid_argument("temporal_study: reference must use more steps than any rung");
  const auto states = run_temporal_ladder(p, bc, spec, y0, M_ladder, N_fixed, ref.T);
  return state_report(states, ref);
}

ConvergenceReport control_study(StudyAxis axis, const ModelParams& p, BoundaryCondition bc,
                                const InterpolantSpec& spec, const InitialData& y0,
                                const std::vector<int>& ladder, int fixed,
                                const ReferenceSolution& ref) {
  if (axis == StudyAxis::Control)
    throw std::invalid_argument("control_study: axis selects Space or Time refinement");
  const auto states = axis == StudyAxis::Space
                          ? run_spatial_ladder(p, bc, spec, y0, ladder, fixed, ref.T)
                          : run_temporal_ladder(p, bc, spec, y0, ladder, fixed, ref.T);
  return control_report(states, ref, spec);
}

FdSolution fd_oracle(const ModelParams& p, BoundaryCondition bc, const InitialData& y0,
                     int grid_points, int steps, double T) {
  if (grid_points < 2) throw std::invalid_argument("fd_oracle: need >= 2 grid intervals");
  if (steps < 1) throw std::invalid_argument("fd_oracle: need >= 1 steps");
  const int n = grid_points;
  const double h = 1.0 / n;
  const double k = T / steps;

  // Unknown nodes per boundary condition (others pinned to zero).
  const int lo = bc == BoundaryCondition::Neumann ? 0 : 1;
  const int hi = bc == BoundaryCondition::Dirichlet ? n - 1 : n;
  const int m = hi - lo + 1;

  // value(j) with ghost-node reflection for Neumann-type ends.
  const auto value = [&](const std::vector<double>& u, int j) -> double {
    if (j < lo) {
      if (bc == BoundaryCondition::Neumann && j == -1) return u[1 - lo];
      return 0.0;  // essential end
    }
    if (j > hi) {
      if (bc != BoundaryCondition::Dirichlet && j == n + 1) return u[n - 1 - lo];
      return 0.0;  // essential end
    }
    return u[j - lo];
  };
  // Column index of the unknown aliased by logical node j in row arithmetic.
  const auto alias = [&](int j) -> int {
    if (j == -1 && bc == BoundaryCondition::Neumann) return 1 - lo;
    if (j == n + 1 && bc != BoundaryCondition::Dirichlet) return n - 1 - lo;
    if (j < lo || j > hi) return -1;
    return j - lo;
  };

  std::vector<double> u(m);
  for (int j = lo; j <= hi; ++j) u[j - lo] = y0(static_cast<double>(j) / n);

  for (int s = 0; s < steps; ++s) {
    const std::vector<double> u_prev = u;
    bool converged = false;
    for (int it = 0; it <= 25; ++it) {
      // Residual of the implicit step at the current iterate. `tmax` tracks
      // the componentwise magnitude of the summed terms: its rounding bounds
      // the smallest residual the evaluation can produce, which exceeds the
      // nominal tolerance once nu/h^2 or 1/k is large.
      std::vector<double> f(m);
      double fmax = 0.0, tmax = 0.0;
      for (int j = lo; j <= hi; ++j) {
        const double uj = value(u, j);
        const double um = value(u, j - 1), up = value(u, j + 1);
        const double lap = (um - 2.0 * uj + up) / (h * h);
        const double fb = 0.25 * (um + 2.0 * uj + up);
        f[j - lo] = (uj - u_prev[j - lo]) / k - p.nu * lap - p.gamma * uj +
                    p.delta * uj * uj * uj + p.mu * fb;
        fmax = std::max(fmax, std::abs(f[j - lo]));
        const double mag = (std::abs(uj) + std::abs(u_prev[j - lo])) / k +
                           p.nu * (std::abs(um) + 2.0 * std::abs(uj) + std::abs(up)) / (h * h) +
                           p.gamma * std::abs(uj) + p.delta * std::abs(uj * uj * uj) +
                           p.mu * std::abs(fb);
        tmax = std::max(tmax, mag);
      }
      const double ftol =
          std::max(1e-12, 4.0 * std::numeric_limits<double>::epsilon() * tmax);
      if (fmax <= ftol) {
        converged = true;
        break;
      }
      if (it == 25) break;

      BandedMatrix J(m, 1, 1);
      for (int j = lo; j <= hi; ++j) {
        const int row = j - lo;
        const double uj = value(u, j);
        J.at(row, row) += 1.0 / k + 2.0 * p.nu / (h * h) - p.gamma +
                          3.0 * p.delta * uj * uj + 0.5 * p.mu;
        for (int d : {-1, 1}) {
          const int col = alias(j + d);
          if (col >= 0) J.at(row, col) += -p.nu / (h * h) + 0.25 * p.mu;
        }
      }
      const auto du = BandedLU(std::move(J)).solve(f);
      for (int i = 0; i < m; ++i) u[i] -= du[i];
    }
    if (!converged) throw std::runtime_error("fd_oracle: Newton stalled");
  }

  FdSolution sol;
  sol.x.resize(n + 1);
  sol.y.assign(n + 1, 0.0);
  for (int j = 0; j <= n; ++j) sol.x[j] = static_cast<double>(j) / n;
  for (int j = lo; j <= hi; ++j) sol.y[j] = u[j - lo];
  return sol;
}

}  // namespace cif
