#include "cif/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "cif/assembly.hpp"
#include "cif/linalg.hpp"

namespace cif {

namespace {

constexpr double kT3[3] = {0.1127016653792583, 0.5, 0.8872983346207417};
constexpr double kW3[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

void put_row(std::ostream& out, const double* values, int count, int iters, bool with_iters) {
  char buf[64];
  for (int i = 0; i < count; ++i) {
    std::snprintf(buf, sizeof buf, "%.12g", values[i]);
    out << (i ? "," : "") << buf;
  }
  if (with_iters) out << ',' << iters;
  out << '\n';
}

}  // namespace

double l2_norm(const FemFunction& f) {
  const auto M = mass_matrix(*f.mesh, f.bc);
  return std::sqrt(std::max(0.0, bilinear(M, f.coeffs, f.coeffs)));
}

double h1_seminorm(const FemFunction& f) {
  const auto A = stiffness_matrix(*f.mesh, f.bc);
  return std::sqrt(std::max(0.0, bilinear(A, f.coeffs, f.coeffs)));
}

double l4_norm(const FemFunction& f) {
  const MeshPartition& mesh = *f.mesh;
  const auto v = f.full_values();
  double s = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double he = mesh.element_lengths[e];
    for (int q = 0; q < 3; ++q) {
      const double t = kT3[q];
      const double y = v[e] * (1.0 - t) + v[e + 1] * t;
      s += he * kW3[q] * y * y * y * y;
    }
  }
  return std::pow(s, 0.25);
}

double linf_norm(const FemFunction& f) {
  double m = 0.0;
  for (double v : f.full_values()) m = std::max(m, std::abs(v));
  return m;
}

DecayFit decay_rate_fit(const Trajectory& traj, std::optional<double> t_begin,
                        std::optional<double> t_end) {
  if (traj.times.size() < 2) throw std::invalid_argument("decay_rate_fit: trajectory too short");
  const double tb = t_begin.value_or(0.2 * traj.times.back());
  const double te = t_end.value_or(traj.times.back());
  if (!(tb < te)) throw std::invalid_argument("decay_rate_fit: empty fit window");

  std::vector<double> ts, logs;
  for (std::size_t n = 0; n < traj.times.size(); ++n) {
    const double t = traj.times[n];
    if (t < tb || t > te) continue;
    if (!(traj.l2[n] > 0.0))
      throw std::invalid_argument("decay_rate_fit: L2 series not strictly positive on window");
    ts.push_back(t);
    logs.push_back(std::log(traj.l2[n]));
  }
  if (ts.size() < 2) throw std::invalid_argument("decay_rate_fit: fewer than 2 samples in window");

  const std::size_t n = ts.size();
  double mt = 0.0, ml = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += ts[i];
    ml += logs[i];
  }
  mt /= static_cast<double>(n);
  ml /= static_cast<double>(n);
  double stt = 0.0, stl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    stl += (ts[i] - mt) * (logs[i] - ml);
  }
  const double slope = stl / stt;
  const double intercept = ml - slope * mt;

  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = logs[i] - (intercept + slope * ts[i]);
    ss += r * r;
  }

  DecayFit fit;
  fit.alpha_est = -slope;
  fit.t_begin = ts.front();
  fit.t_end = ts.back();
  fit.rms_residual = std::sqrt(ss / static_cast<double>(n));
  return fit;
}

DecayCheckReport verify_discrete_decay(const Trajectory& traj, const ModelParams& p, double h,
                                       double alpha) {
  if (traj.times.empty()) throw std::invalid_argument("verify_discrete_decay: empty trajectory");
  if (!(alpha >= 0.0)) throw std::invalid_argument("verify_discrete_decay: alpha must be >= 0");

  DecayCheckReport report;
  const auto cond = check_stabilization_conditions(p, h);
  report.conditions_ok = cond.all_ok();

  const double k = traj.meta.k;
  const double beta2 = p.mu - 3.0 * p.nu - 2.0 * p.gamma;
  const double beta3 = p.mu - 2.0 * p.nu - 2.0 * p.gamma;
  const double growth = std::exp(alpha * k);
  report.step_condition_beta2 = growth < 1.0 + 0.5 * k * beta2;
  report.step_condition_beta3 = growth < 1.0 + 0.5 * k * beta3;

  const double y0_sq = traj.l2.front() * traj.l2.front();
  for (std::size_t n = 0; n < traj.times.size(); ++n) {
    const double lhs = traj.l2[n] * traj.l2[n];
    const double rhs = std::exp(-2.0 * alpha * traj.times[n]) * y0_sq;
    if (lhs > rhs * (1.0 + 1e-12)) {
      if (report.first_violation_step < 0) report.first_violation_step = static_cast<int>(n);
      ++report.violation_count;
      if (rhs > 0.0) report.worst_excess = std::max(report.worst_excess, lhs / rhs - 1.0);
    }
  }
  report.ok = report.violation_count == 0;
  return report;
}

std::vector<std::pair<double, double>> control_series(const Trajectory& traj) {
  std::vector<std::pair<double, double>> s;
  s.reserve(traj.times.size());
  for (std::size_t n = 0; n < traj.times.size(); ++n)
    s.emplace_back(traj.times[n], traj.control_l2[n]);
  return s;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  out << "t,l2_norm,h1_norm,control_l2,newton_iters\n";
  for (std::size_t n = 0; n < traj.times.size(); ++n) {
    const double row[4] = {traj.times[n], traj.l2[n], traj.h1_semi[n], traj.control_l2[n]};
    put_row(out, row, 4, traj.newton_iters[n], true);
  }
}

void write_diagnostics_csv(const Trajectory& traj, double alpha, std::ostream& out) {
  out << "t,l2_norm,h1_norm,l4_norm,control_l2,decay_bound_rhs\n";
  const double y0_sq = traj.l2.empty() ? 0.0 : traj.l2.front() * traj.l2.front();
  for (std::size_t n = 0; n < traj.times.size(); ++n) {
    const double rhs = std::exp(-2.0 * alpha * traj.times[n]) * y0_sq;
    const double row[6] = {traj.times[n], traj.l2[n],         traj.h1_semi[n],
                           traj.l4[n],    traj.control_l2[n], rhs};
    put_row(out, row, 6, 0, false);
  }
}

}  // namespace cif
