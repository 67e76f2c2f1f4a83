#include "cif/interpolants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cif {

namespace {

constexpr double kT5[5] = {0.04691007703066800, 0.23076534494715845, 0.5,
                           0.76923465505284155, 0.95308992296933200};
constexpr double kW5[5] = {0.11846344252809454, 0.23931433524968324, 0.28444444444444444,
                          0.23931433524968324, 0.11846344252809454};

void check_breakpoints(const std::vector<double>& b) {
  if (b.size() < 2) throw std::invalid_argument("observation partition needs >= 2 breakpoints");
  if (b.front() != 0.0 || b.back() != 1.0)
    throw std::invalid_argument("observation partition must span [0, 1]");
  for (std::size_t i = 0; i + 1 < b.size(); ++i)
    if (!(b[i] < b[i + 1]))
      throw std::invalid_argument("observation breakpoints must strictly increase");
}

double sample_point(SampleRule rule, double a, double b) {
  switch (rule) {
    case SampleRule::Left:
      return a;
    case SampleRule::Midpoint:
      return 0.5 * (a + b);
    case SampleRule::Right:
      return b;
  }
  return 0.5 * (a + b);
}

// Composite 5-point Gauss over [a, b] split into `panels` sub-intervals.
double integrate(const std::function<double(double)>& f, double a, double b, int panels) {
  double total = 0.0;
  const double w = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double x0 = a + p * w;
    for (int q = 0; q < 5; ++q) total += w * kW5[q] * f(x0 + kT5[q] * w);
  }
  return total;
}

}  // namespace

InterpolantSpec InterpolantSpec::nodal(SampleRule rule) {
  InterpolantSpec s;
  s.kind = NodalValues{rule};
  return s;
}

InterpolantSpec InterpolantSpec::volumes() {
  InterpolantSpec s;
  s.kind = FiniteVolumes{};
  return s;
}

InterpolantSpec InterpolantSpec::fourier(int mode_count) {
  if (mode_count < 0) throw std::invalid_argument("fourier mode count must be >= 0");
  InterpolantSpec s;
  s.kind = FourierModes{mode_count};
  return s;
}

std::vector<double> InterpolantSpec::uniform_breakpoints(int m) {
  if (m < 1) throw std::invalid_argument("uniform_breakpoints: need m >= 1 intervals");
  std::vector<double> b(m + 1);
  for (int i = 0; i <= m; ++i) b[i] = static_cast<double>(i) / m;
  b.front() = 0.0;
  b.back() = 1.0;
  return b;
}

InterpolantSpec InterpolantSpec::with_partition(std::vector<double> breakpoints) const {
  check_breakpoints(breakpoints);
  InterpolantSpec s = *this;
  s.partition = std::move(breakpoints);
  return s;
}

int InterpolantSpec::controller_count(const MeshPartition& mesh) const {
  if (is_fourier()) return std::get<FourierModes>(kind).mode_count;
  if (partition) return static_cast<int>(partition->size()) - 1;
  return mesh.num_elements();
}

double InterpolantSpec::observation_scale(const MeshPartition& mesh) const {
  if (is_fourier()) return mesh.h;
  const auto b = resolve_partition(mesh);
  double widest = 0.0;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) widest = std::max(widest, b[i + 1] - b[i]);
  return widest;
}

std::vector<double> InterpolantSpec::resolve_partition(const MeshPartition& mesh) const {
  if (is_fourier())
    throw std::logic_error("resolve_partition: Fourier modes have no observation partition");
  if (partition) return *partition;
  return mesh.nodes;
}

std::string InterpolantSpec::kind_name() const {
  if (is_nodal()) return "nodal";
  if (is_volumes()) return "volumes";
  return "fourier";
}

double PiecewiseConstantFn::eval(double x) const {
  if (values.empty()) return 0.0;
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  int i = static_cast<int>(it - breakpoints.begin()) - 1;
  i = std::clamp(i, 0, interval_count() - 1);
  return values[i];
}

double PiecewiseConstantFn::l2_norm() const {
  double s = 0.0;
  for (int i = 0; i < interval_count(); ++i) {
    const double w = breakpoints[i + 1] - breakpoints[i];
    s += values[i] * values[i] * w;
  }
  return std::sqrt(s);
}

PiecewiseConstantFn apply_nodal(const InterpolantSpec& spec, const FemFunction& f) {
  if (!spec.is_nodal()) throw std::invalid_argument("apply_nodal: spec is not a nodal kind");
  const auto rule = std::get<NodalValues>(spec.kind).sample_rule;
  PiecewiseConstantFn out;
  out.breakpoints = spec.resolve_partition(*f.mesh);
  out.values.resize(out.breakpoints.size() - 1);
  for (std::size_t i = 0; i + 1 < out.breakpoints.size(); ++i)
    out.values[i] = eval(f, sample_point(rule, out.breakpoints[i], out.breakpoints[i + 1]));
  return out;
}

PiecewiseConstantFn apply_nodal(const InterpolantSpec& spec,
                                const std::function<double(double)>& f) {
  if (!spec.is_nodal()) throw std::invalid_argument("apply_nodal: spec is not a nodal kind");
  if (!spec.partition)
    throw std::invalid_argument("apply_nodal: callable form needs an explicit partition");
  const auto rule = std::get<NodalValues>(spec.kind).sample_rule;
  PiecewiseConstantFn out;
  out.breakpoints = *spec.partition;
  out.values.resize(out.breakpoints.size() - 1);
  for (std::size_t i = 0; i + 1 < out.breakpoints.size(); ++i)
    out.values[i] = f(sample_point(rule, out.breakpoints[i], out.breakpoints[i + 1]));
  return out;
}

PiecewiseConstantFn apply_volumes(const InterpolantSpec& spec, const FemFunction& f) {
  if (!spec.is_volumes()) throw std::invalid_argument("apply_volumes: spec is not a volume kind");
  const MeshPartition& mesh = *f.mesh;
  PiecewiseConstantFn out;
  out.breakpoints = spec.resolve_partition(mesh);
  out.values.assign(out.breakpoints.size() - 1, 0.0);
  const auto v = f.full_values();

  // Exact element-wise trapezoid areas of the piecewise-linear integrand; the
  // observation breakpoints are required to be mesh nodes so each element
  // belongs to exactly one observation interval.
  std::size_t iv = 0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double mid = 0.5 * (mesh.nodes[e] + mesh.nodes[e + 1]);
    while (iv + 2 < out.breakpoints.size() && mid > out.breakpoints[iv + 1]) ++iv;
    if (mesh.nodes[e] < out.breakpoints[iv] - 1e-12 ||
        mesh.nodes[e + 1] > out.breakpoints[iv + 1] + 1e-12)
      throw std::invalid_argument(
          "apply_volumes: observation breakpoints must coincide with mesh nodes");
    out.values[iv] += 0.5 * mesh.element_lengths[e] * (v[e] + v[e + 1]);
  }
  for (std::size_t i = 0; i + 1 < out.breakpoints.size(); ++i)
    out.values[i] /= out.breakpoints[i + 1] - out.breakpoints[i];
  return out;
}

PiecewiseConstantFn apply_volumes(const InterpolantSpec& spec,
                                  const std::function<double(double)>& f) {
  if (!spec.is_volumes()) throw std::invalid_argument("apply_volumes: spec is not a volume kind");
  if (!spec.partition)
    throw std::invalid_argument("apply_volumes: callable form needs an explicit partition");
  PiecewiseConstantFn out;
  out.breakpoints = *spec.partition;
  out.values.resize(out.breakpoints.size() - 1);
  for (std::size_t i = 0; i + 1 < out.breakpoints.size(); ++i) {
    const double a = out.breakpoints[i], b = out.breakpoints[i + 1];
    out.values[i] = integrate(f, a, b, 16) / (b - a);
  }
  return out;
}

double eigenfunction(BoundaryCondition bc, int position, double x) {
  if (position < 0) throw std::invalid_argument("eigenfunction: position must be >= 0");
  const double pi = std::numbers::pi;
  switch (bc) {
    case BoundaryCondition::Mixed:
      return std::numbers::sqrt2 * std::sin((2 * position + 1) * pi * x / 2.0);
    case BoundaryCondition::Dirichlet:
      return std::numbers::sqrt2 * std::sin((position + 1) * pi * x);
    case BoundaryCondition::Neumann:
      return position == 0 ? 1.0 : std::numbers::sqrt2 * std::cos(position * pi * x);
  }
  return 0.0;
}

double FourierProjection::eval(double x) const {
  double s = 0.0;
  for (std::size_t m = 0; m < coefficients.size(); ++m)
    s += coefficients[m] * eigenfunction(bc, static_cast<int>(m), x);
  return s;
}

double FourierProjection::l2_norm() const {
  double s = 0.0;
  for (double c : coefficients) s += c * c;
  return std::sqrt(s);
}

FourierProjection apply_fourier(const InterpolantSpec& spec, const FemFunction& f) {
  if (!spec.is_fourier()) throw std::invalid_argument("apply_fourier: spec is not a Fourier kind");
  const int count = std::get<FourierModes>(spec.kind).mode_count;
  const MeshPartition& mesh = *f.mesh;
  const auto v = f.full_values();
  FourierProjection out;
  out.bc = f.bc;
  out.coefficients.assign(count, 0.0);
  // Per-element 5-point Gauss; matches the quadrature used to assemble the
  // Fourier feedback rows, so B c == sum_m g_m (g_m . c) holds to roundoff.
  for (int m = 0; m < count; ++m) {
    double c = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
      const double a = mesh.nodes[e];
      const double he = mesh.element_lengths[e];
      for (int q = 0; q < 5; ++q) {
        const double t = kT5[q];
        const double y = v[e] * (1.0 - t) + v[e + 1] * t;
        c += he * kW5[q] * y * eigenfunction(f.bc, m, a + t * he);
      }
    }
    out.coefficients[m] = c;
  }
  return out;
}

FourierProjection apply_fourier(const InterpolantSpec& spec,
                                const std::function<double(double)>& f, BoundaryCondition bc) {
  if (!spec.is_fourier()) throw std::invalid_argument("apply_fourier: spec is not a Fourier kind");
  const int count = std::get<FourierModes>(spec.kind).mode_count;
  FourierProjection out;
  out.bc = bc;
  out.coefficients.assign(count, 0.0);
  for (int m = 0; m < count; ++m) {
    const auto integrand = [&](double x) { return f(x) * eigenfunction(bc, m, x); };
    out.coefficients[m] = integrate(integrand, 0.0, 1.0, 2048);
  }
  return out;
}

double interpolant_l2_norm(const InterpolantSpec& spec, const FemFunction& f) {
  if (spec.is_nodal()) return apply_nodal(spec, f).l2_norm();
  if (spec.is_volumes()) return apply_volumes(spec, f).l2_norm();
  return apply_fourier(spec, f).l2_norm();
}

InterpolationBoundReport verify_interpolation_bound(const InterpolantSpec& spec,
                                                    const std::vector<SampleFunction>& samples,
                                                    double h) {
  if (!(h > 0.0) || h > 1.0)
    throw std::invalid_argument("verify_interpolation_bound: need 0 < h <= 1");
  const int m = std::max(1, static_cast<int>(std::lround(1.0 / h)));

  InterpolantSpec local = spec;
  if (!spec.is_fourier()) local = spec.with_partition(InterpolantSpec::uniform_breakpoints(m));

  InterpolationBoundReport report;
  const int panels_per_interval = std::max(8, 4096 / m);
  for (const auto& s : samples) {
    std::function<double(double)> ih;
    if (local.is_nodal()) {
      auto pc = apply_nodal(local, s.f);
      ih = [pc](double x) { return pc.eval(x); };
    } else if (local.is_volumes()) {
      auto pc = apply_volumes(local, s.f);
      ih = [pc](double x) { return pc.eval(x); };
    } else {
      throw std::invalid_argument(
          "verify_interpolation_bound: Fourier kinds use a spectral bound, not a width bound");
    }

    double err2 = 0.0;
    double h1_2 = 0.0;
    for (int i = 0; i < m; ++i) {
      const double a = static_cast<double>(i) / m;
      const double b = static_cast<double>(i + 1) / m;
      err2 += integrate(
          [&](double x) {
            const double d = s.f(x) - ih(x);
            return d * d;
          },
          a, b, panels_per_interval);
      h1_2 += integrate(
          [&](double x) {
            const double fx = s.f(x), dfx = s.df(x);
            return fx * fx + dfx * dfx;
          },
          a, b, panels_per_interval);
    }
    const double denom = (1.0 / m) * std::sqrt(h1_2);
    report.ratios.push_back(denom > 0.0 ? std::sqrt(err2) / denom : 0.0);
    report.max_ratio = std::max(report.max_ratio, report.ratios.back());
  }
  return report;
}

}  // namespace cif
