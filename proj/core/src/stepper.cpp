#include "cif/stepper.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <map>
#include <utility>

#include "cif/linalg.hpp"

namespace cif {

void StepperConfig::validate() const {
  if (!(k > 0.0)) throw std::invalid_argument("StepperConfig: time step k must be > 0");
  if (!(T > 0.0)) throw std::invalid_argument("StepperConfig: final time T must be > 0");
  if (!(newton_abs_tol > 0.0))
    throw std::invalid_argument("StepperConfig: newton_abs_tol must be > 0");
  if (newton_max_iters < 1)
    throw std::invalid_argument("StepperConfig: newton_max_iters must be >= 1");
  for (double t : snapshot_times)
    if (t < 0.0 || t > T)
      throw std::invalid_argument("StepperConfig: snapshot times must lie in [0, T]");
}

bool step_size_guard(const ModelParams& p, double h, double k) {
  return k * (p.gamma + 0.5 * p.mu * p.c_p * p.c_p * h * h) < 1.0;
}

AssembledSystem assemble_system(MeshPtr mesh, BoundaryCondition bc, const InterpolantSpec* spec) {
  AssembledSystem sys;
  sys.bc = bc;
  sys.M = mass_matrix(*mesh, bc);
  sys.A = stiffness_matrix(*mesh, bc);
  if (spec) sys.B = feedback_operator(*spec, *mesh, bc);
  sys.mesh = std::move(mesh);
  return sys;
}

NewtonFailure::NewtonFailure(const std::string& what, NewtonReport report, int step_index)
    : std::runtime_error(what), report_(std::move(report)), step_index_(step_index) {}

namespace {

// Riesz L2 norm of a dual-space residual: sqrt(r^T M^{-1} r).
double riesz_norm(const TridiagonalMatrix& M, const std::vector<double>& r) {
  const auto z = solve_tridiagonal(M, r);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r[i] * z[i];
  return std::sqrt(std::max(0.0, s));
}

// Componentwise |A| |x|: the intermediate magnitudes whose rounding bounds the
// evaluation error of A x.
std::vector<double> abs_apply(const TridiagonalMatrix& t, const std::vector<double>& x) {
  const int n = t.n();
  std::vector<double> y(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = std::abs(t.diag[i] * x[i]);
    if (i > 0) s += std::abs(t.sub[i - 1] * x[i - 1]);
    if (i + 1 < n) s += std::abs(t.super[i] * x[i + 1]);
    y[i] = s;
  }
  return y;
}

// Residual of the implicit step at y. When `magnitude` is non-null it receives
// the componentwise term magnitudes |M||y|/k + |M y_prev|/k + nu |A||y| + ...,
// whose rounding sets the smallest residual representable in double precision:
// at fine resolutions (nu/h^2 or 1/k large) that floor exceeds any fixed
// absolute tolerance and Newton must be allowed to stop there.
std::vector<double> residual(const std::vector<double>& y, const std::vector<double>& m_y_prev,
                             const ModelParams& p, const AssembledSystem& sys, double k,
                             const FemFunction& shape, std::vector<double>* magnitude) {
  const auto my = sys.M.apply(y);
  const auto ay = sys.A.apply(y);
  FemFunction yf = shape;
  yf.coeffs = y;
  const auto cub = cubic_term(yf);
  std::vector<double> f(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    f[i] = (my[i] - m_y_prev[i]) / k + p.nu * ay[i] - p.gamma * my[i] + p.delta * cub[i];
  if (sys.B) {
    const auto by = sys.B->apply(y);
    for (std::size_t i = 0; i < y.size(); ++i) f[i] += p.mu * by[i];
  }
  if (magnitude) {
    const auto m_abs = abs_apply(sys.M, y);
    const auto a_abs = abs_apply(sys.A, y);
    magnitude->assign(y.size(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i)
      (*magnitude)[i] = (m_abs[i] + std::abs(m_y_prev[i])) / k + p.nu * a_abs[i] +
                        p.gamma * m_abs[i] + p.delta * std::abs(cub[i]);
    if (sys.B) {
      if (sys.B->banded) {
        const BandedMatrix& Bb = *sys.B->banded;
        for (int i = 0; i < Bb.n(); ++i) {
          double s = 0.0;
          for (int j = std::max(0, i - Bb.kl());
               j <= std::min(Bb.n() - 1, i + Bb.ku()); ++j)
            s += std::abs(Bb.get(i, j) * y[j]);
          (*magnitude)[i] += p.mu * s;
        }
      }
      for (const auto& g : sys.B->lowrank_rows) {
        double dot = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) dot += std::abs(g[i] * y[i]);
        for (std::size_t i = 0; i < y.size(); ++i)
          (*magnitude)[i] += p.mu * std::abs(g[i]) * dot;
      }
    }
  }
  return f;
}

std::vector<double> jacobian_solve(const TridiagonalMatrix& tri, const AssembledSystem& sys,
                                   double mu, const std::vector<double>& rhs) {
  const int n = tri.n();
  int kl = 1, ku = 1;
  if (sys.B && sys.B->banded) {
    kl = std::max(kl, sys.B->banded->kl());
    ku = std::max(ku, sys.B->banded->ku());
  }
  BandedMatrix J(n, kl, ku);
  J.add_tridiagonal(1.0, tri);
  if (sys.B && sys.B->banded) {
    const BandedMatrix& Bb = *sys.B->banded;
    for (int i = 0; i < n; ++i) {
      const int j0 = std::max(0, i - Bb.kl());
      const int j1 = std::min(n - 1, i + Bb.ku());
      for (int j = j0; j <= j1; ++j) {
        const double v = Bb.get(i, j);
        if (v != 0.0) J.at(i, j) += mu * v;
      }
    }
  }
  if (sys.B && !sys.B->lowrank_rows.empty())
    return LowRankCorrectedSolver(std::move(J), sys.B->lowrank_rows, mu).solve(rhs);
  return BandedLU(std::move(J)).solve(rhs);
}

}  // namespace

FemFunction backward_euler_step(const FemFunction& y_prev, const ModelParams& p,
                                const AssembledSystem& sys, const StepperConfig& cfg,
                                NewtonReport* report) {
  const double k = cfg.k;
  const auto m_y_prev = sys.M.apply(y_prev.coeffs);

  // Fixed linear part of the Jacobian: M/k + nu A - gamma M.
  TridiagonalMatrix j_lin = sys.M.scaled(1.0 / k - p.gamma);
  j_lin.add_scaled(p.nu, sys.A);

  FemFunction y = y_prev;
  NewtonReport rep;
  std::vector<double> mag;
  double tol = cfg.newton_abs_tol;
  for (;;) {
    const auto f = residual(y.coeffs, m_y_prev, p, sys, k, y_prev, &mag);
    // Smallest residual norm distinguishable from rounding noise when the
    // terms were summed at these magnitudes; on fine meshes (nu/h^2 large) or
    // tiny steps (1/k large) it can exceed newton_abs_tol, in which case
    // iterating further cannot improve the state.
    const double floor =
        2.0 * std::numeric_limits<double>::epsilon() * riesz_norm(sys.M, mag);
    tol = std::max(cfg.newton_abs_tol, floor);
    rep.residual_norms.push_back(riesz_norm(sys.M, f));
    if (rep.residual_norms.back() <= tol) {
      rep.converged = true;
      break;
    }
    if (rep.iterations >= cfg.newton_max_iters) break;

    TridiagonalMatrix j_tri = j_lin;
    j_tri.add_scaled(p.delta, cubic_jacobian(y));
    const auto update = jacobian_solve(j_tri, sys, p.mu, f);
    for (std::size_t i = 0; i < y.coeffs.size(); ++i) y.coeffs[i] -= update[i];
    ++rep.iterations;
  }

  if (report) *report = rep;
  if (!rep.converged) {
    char tol_text[32];
    std::snprintf(tol_text, sizeof tol_text, "%.3g", tol);
    throw NewtonFailure("Newton did not reach tolerance " + std::string(tol_text) + " within " +
                            std::to_string(cfg.newton_max_iters) + " updates",
                        rep);
  }
  return y;
}

Trajectory simulate(const FemFunction& y0h, const ModelParams& p, const InterpolantSpec& spec,
                    BoundaryCondition bc, const StepperConfig& cfg) {
  p.validate();
  cfg.validate();
  if (y0h.bc != bc)
    throw std::invalid_argument("simulate: initial state carries a different boundary condition");

  const MeshPtr mesh = y0h.mesh;
  const AssembledSystem sys = assemble_system(mesh, bc, &spec);
  const double h_obs = spec.observation_scale(*mesh);
  if (!step_size_guard(p, h_obs, cfg.k))
    std::cerr << "simulate: warning: step-size guard k*(gamma + mu*c_p^2*h^2/2) < 1 fails "
                 "(k = "
              << cfg.k << ", h = " << h_obs << "); proceeding anyway\n";

  const int steps = std::max(1, static_cast<int>(std::ceil(cfg.T / cfg.k - 1e-9)));

  std::map<int, int> snapshot_requests;
  for (double t : cfg.snapshot_times) {
    int idx = static_cast<int>(std::lround(t / cfg.k));
    idx = std::min(std::max(idx, 0), steps);
    ++snapshot_requests[idx];
  }

  Trajectory traj;
  traj.meta = RunMetadata{p, bc, spec, cfg.k, cfg.T};
  const auto record = [&](double t, const FemFunction& y, int iters) {
    traj.times.push_back(t);
    traj.l2.push_back(std::sqrt(std::max(0.0, bilinear(sys.M, y.coeffs, y.coeffs))));
    traj.h1_semi.push_back(std::sqrt(std::max(0.0, bilinear(sys.A, y.coeffs, y.coeffs))));
    traj.l4.push_back(l4_norm(y));
    traj.linf.push_back(linf_norm(y));
    traj.control_l2.push_back(interpolant_l2_norm(spec, y));
    traj.newton_iters.push_back(iters);
    if (auto it = snapshot_requests.find(static_cast<int>(traj.times.size()) - 1);
        it != snapshot_requests.end())
      for (int c = 0; c < it->second; ++c) traj.snapshots.emplace_back(t, y);
  };

  FemFunction y = y0h;
  record(0.0, y, 0);
  for (int n = 1; n <= steps; ++n) {
    NewtonReport rep;
    try {
      y = backward_euler_step(y, p, sys, cfg, &rep);
    } catch (const NewtonFailure& e) {
      throw NewtonFailure(std::string(e.what()) + " at step " + std::to_string(n), e.report(), n);
    }
    record(n * cfg.k, y, rep.iterations);
  }
  traj.final_state = y;
  return traj;
}

}  // namespace cif
