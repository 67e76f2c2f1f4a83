#include "cif/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cif {

namespace {

// 3-point Gauss–Legendre on [0, 1] in barycentric coordinate t: exact for
// polynomials of degree <= 5, which covers every integrand assembled here
// (the worst case, y^2 phi_i phi_j, has degree 4 per element).
constexpr double kT3[3] = {0.1127016653792583, 0.5, 0.8872983346207417};
constexpr double kW3[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

// 5-point Gauss–Legendre on [0, 1], for eigenfunction loads (trigonometric
// integrands; accurate to ~1e-14 at the mode counts and mesh widths in use).
constexpr double kT5[5] = {0.04691007703066800, 0.23076534494715845, 0.5,
                           0.76923465505284155, 0.95308992296933200};
constexpr double kW5[5] = {0.11846344252809454, 0.23931433524968324, 0.28444444444444444,
                          0.23931433524968324, 0.11846344252809454};

TridiagonalMatrix strip_to_free(const MeshPartition& mesh, BoundaryCondition bc,
                                const std::vector<double>& diag_full,
                                const std::vector<double>& off_full) {
  // off_full[j] couples nodes j and j+1.
  const int base = first_free_node(bc);
  const int n = free_node_count(mesh, bc);
  TridiagonalMatrix t = TridiagonalMatrix::zero(n);
  for (int d = 0; d < n; ++d) t.diag[d] = diag_full[base + d];
  for (int d = 0; d + 1 < n; ++d) {
    t.sub[d] = off_full[base + d];
    t.super[d] = off_full[base + d];
  }
  return t;
}

}  // namespace

TridiagonalMatrix mass_matrix(const MeshPartition& mesh, BoundaryCondition bc) {
  const int N = mesh.num_elements();
  std::vector<double> diag_full(N + 1, 0.0), off_full(N, 0.0);
  for (int e = 0; e < N; ++e) {
    const double he = mesh.element_lengths[e];
    diag_full[e] += he / 3.0;
    diag_full[e + 1] += he / 3.0;
    off_full[e] += he / 6.0;
  }
  return strip_to_free(mesh, bc, diag_full, off_full);
}

TridiagonalMatrix stiffness_matrix(const MeshPartition& mesh, BoundaryCondition bc) {
  const int N = mesh.num_elements();
  std::vector<double> diag_full(N + 1, 0.0), off_full(N, 0.0);
  for (int e = 0; e < N; ++e) {
    const double he = mesh.element_lengths[e];
    diag_full[e] += 1.0 / he;
    diag_full[e + 1] += 1.0 / he;
    off_full[e] -= 1.0 / he;
  }
  return strip_to_free(mesh, bc, diag_full, off_full);
}

std::vector<double> cubic_term(const FemFunction& y) {
  const MeshPartition& mesh = *y.mesh;
  const int N = mesh.num_elements();
  const auto v = y.full_values();
  std::vector<double> b_full(N + 1, 0.0);
  for (int e = 0; e < N; ++e) {
    const double he = mesh.element_lengths[e];
    const double yl = v[e], yr = v[e + 1];
    for (int q = 0; q < 3; ++q) {
      const double t = kT3[q];
      const double w = he * kW3[q];
      const double yy = yl * (1.0 - t) + yr * t;
      const double y3 = yy * yy * yy;
      b_full[e] += w * y3 * (1.0 - t);
      b_full[e + 1] += w * y3 * t;
    }
  }
  const int base = first_free_node(y.bc);
  const int n = free_node_count(mesh, y.bc);
  return std::vector<double>(b_full.begin() + base, b_full.begin() + base + n);
}

TridiagonalMatrix cubic_jacobian(const FemFunction& y) {
  const MeshPartition& mesh = *y.mesh;
  const int N = mesh.num_elements();
  const auto v = y.full_values();
  std::vector<double> diag_full(N + 1, 0.0), off_full(N, 0.0);
  for (int e = 0; e < N; ++e) {
    const double he = mesh.element_lengths[e];
    const double yl = v[e], yr = v[e + 1];
    for (int q = 0; q < 3; ++q) {
      const double t = kT3[q];
      const double w = he * kW3[q];
      const double yy = yl * (1.0 - t) + yr * t;
      const double y2 = 3.0 * yy * yy;
      diag_full[e] += w * y2 * (1.0 - t) * (1.0 - t);
      diag_full[e + 1] += w * y2 * t * t;
      off_full[e] += w * y2 * t * (1.0 - t);
    }
  }
  return strip_to_free(mesh, y.bc, diag_full, off_full);
}

namespace {

// Maps observation breakpoints onto mesh node indices; throws when a
// breakpoint is not a mesh node (the supported configurations are the mesh
// partition itself or a coarsening of it).
std::vector<int> breakpoint_nodes(const std::vector<double>& breakpoints,
                                  const MeshPartition& mesh) {
  std::vector<int> idx;
  idx.reserve(breakpoints.size());
  for (double b : breakpoints) {
    auto it = std::lower_bound(mesh.nodes.begin(), mesh.nodes.end(), b - 1e-12);
    const int j = static_cast<int>(it - mesh.nodes.begin());
    if (j >= mesh.num_nodes() || std::abs(mesh.nodes[j] - b) > 1e-12)
      throw std::invalid_argument(
          "feedback_operator: observation breakpoints must coincide with mesh nodes");
    if (!idx.empty() && j <= idx.back())
      throw std::invalid_argument("feedback_operator: breakpoints must strictly increase");
    idx.push_back(j);
  }
  if (idx.empty() || idx.front() != 0 || idx.back() != mesh.num_elements())
    throw std::invalid_argument("feedback_operator: breakpoints must span [0,1]");
  return idx;
}

}  // namespace

std::vector<double> FeedbackOperator::apply(const std::vector<double>& c) const {
  std::vector<double> y(n, 0.0);
  if (banded) y = banded->apply(c);
  for (const auto& g : lowrank_rows) {
    double dot = 0.0;
    for (int i = 0; i < n; ++i) dot += g[i] * c[i];
    for (int i = 0; i < n; ++i) y[i] += g[i] * dot;
  }
  return y;
}

int FeedbackOperator::bandwidth() const { return banded ? banded->kl() : 0; }

SparseMatrix FeedbackOperator::to_sparse() const {
  SparseMatrix s = SparseMatrix::zero(n, n);
  if (banded) {
    for (int i = 0; i < n; ++i) {
      for (int j = std::max(0, i - banded->kl()); j <= std::min(n - 1, i + banded->ku()); ++j) {
        const double v = banded->get(i, j);
        if (v != 0.0) s.add(i, j, v);
      }
    }
  }
  for (const auto& g : lowrank_rows) {
    for (int i = 0; i < n; ++i) {
      if (g[i] == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        const double v = g[i] * g[j];
        if (v != 0.0) s.add(i, j, v);
      }
    }
  }
  return s;
}

FeedbackOperator feedback_operator(const InterpolantSpec& spec, const MeshPartition& mesh,
                                   BoundaryCondition bc) {
  FeedbackOperator op;
  op.n = free_node_count(mesh, bc);

  if (spec.is_fourier()) {
    const int count = std::get<FourierModes>(spec.kind).mode_count;
    if (count < 0) throw std::invalid_argument("feedback_operator: negative mode count");
    const int base = first_free_node(bc);
    for (int m = 0; m < count; ++m) {
      std::vector<double> g_full(mesh.num_nodes(), 0.0);
      for (int e = 0; e < mesh.num_elements(); ++e) {
        const double a = mesh.nodes[e];
        const double he = mesh.element_lengths[e];
        for (int q = 0; q < 5; ++q) {
          const double t = kT5[q];
          const double w = he * kW5[q];
          const double em = eigenfunction(bc, m, a + t * he);
          g_full[e] += w * em * (1.0 - t);
          g_full[e + 1] += w * em * t;
        }
      }
      op.lowrank_rows.emplace_back(g_full.begin() + base, g_full.begin() + base + op.n);
    }
    return op;
  }

  const auto breakpoints = spec.resolve_partition(mesh);
  const auto bnodes = breakpoint_nodes(breakpoints, mesh);
  int bw = 1;
  for (std::size_t n_int = 0; n_int + 1 < bnodes.size(); ++n_int)
    bw = std::max(bw, bnodes[n_int + 1] - bnodes[n_int]);
  BandedMatrix B(op.n, bw, bw);

  const SampleRule rule =
      spec.is_nodal() ? std::get<NodalValues>(spec.kind).sample_rule : SampleRule::Midpoint;

  for (std::size_t n_int = 0; n_int + 1 < bnodes.size(); ++n_int) {
    const int n0 = bnodes[n_int];
    const int n1 = bnodes[n_int + 1];
    const double width = mesh.nodes[n1] - mesh.nodes[n0];

    // w[i - n0] = integral of phi_i over the observation interval.
    std::vector<double> w(n1 - n0 + 1, 0.0);
    for (int e = n0; e < n1; ++e) {
      const double he = mesh.element_lengths[e];
      w[e - n0] += 0.5 * he;
      w[e + 1 - n0] += 0.5 * he;
    }

    // q[j - n0] = coefficient of c_j in the observed interval value.
    std::vector<double> q(n1 - n0 + 1, 0.0);
    if (spec.is_volumes()) {
      for (int i = 0; i <= n1 - n0; ++i) q[i] = w[i] / width;
    } else {
      double xs = 0.0;
      switch (rule) {
        case SampleRule::Left:
          xs = mesh.nodes[n0];
          break;
        case SampleRule::Midpoint:
          xs = 0.5 * (mesh.nodes[n0] + mesh.nodes[n1]);
          break;
        case SampleRule::Right:
          xs = mesh.nodes[n1];
          break;
      }
      // Element containing the sample point (hat functions are continuous, so
      // either adjacent element gives the same values at shared nodes).
      int e = n1 - 1;
      for (int cand = n0; cand < n1; ++cand) {
        if (xs <= mesh.nodes[cand + 1] + 1e-15) {
          e = cand;
          break;
        }
      }
      const double t = (xs - mesh.nodes[e]) / mesh.element_lengths[e];
      q[e - n0] += 1.0 - t;
      q[e + 1 - n0] += t;
    }

    for (int i = n0; i <= n1; ++i) {
      const int di = dof_index(mesh, bc, i);
      if (di < 0 || w[i - n0] == 0.0) continue;
      for (int j = n0; j <= n1; ++j) {
        const int dj = dof_index(mesh, bc, j);
        if (dj < 0 || q[j - n0] == 0.0) continue;
        B.at(di, dj) += w[i - n0] * q[j - n0];
      }
    }
  }
  op.banded = std::move(B);
  return op;
}

SparseMatrix feedback_matrix(const InterpolantSpec& spec, const MeshPartition& mesh,
                             BoundaryCondition bc) {
  return feedback_operator(spec, mesh, bc).to_sparse();
}

}  // namespace cif
