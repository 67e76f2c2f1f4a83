#include "cif/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <ostream>
#include <stdexcept>

#include "cif/assembly.hpp"
#include "cif/linalg.hpp"

namespace cif {

namespace {

// 5-point Gauss–Legendre on [-1, 1]: the module-wide rule for integrating
// user-supplied data against the basis.
constexpr int kDataQuadPoints = 5;
constexpr double kGaussX[kDataQuadPoints] = {
    -0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
constexpr double kGaussW[kDataQuadPoints] = {
    0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
    0.2369268850561891};

}  // namespace

MeshPartition uniform_partition(int N) {
  if (N < 2) throw std::invalid_argument("uniform_partition: N must be >= 2");
  MeshPartition m;
  m.nodes.resize(N + 1);
  for (int j = 0; j <= N; ++j) m.nodes[j] = static_cast<double>(j) / N;
  m.nodes.front() = 0.0;
  m.nodes.back() = 1.0;
  m.element_lengths.resize(N);
  for (int j = 0; j < N; ++j) m.element_lengths[j] = m.nodes[j + 1] - m.nodes[j];
  m.h = *std::max_element(m.element_lengths.begin(), m.element_lengths.end());
  return m;
}

MeshPartition partition_from_nodes(std::vector<double> nodes) {
  if (nodes.size() < 3)
    throw std::invalid_argument("partition_from_nodes: need at least 3 nodes");
  if (nodes.front() != 0.0 || nodes.back() != 1.0)
    throw std::invalid_argument("partition_from_nodes: endpoints must be 0 and 1");
  MeshPartition m;
  m.nodes = std::move(nodes);
  m.element_lengths.resize(m.nodes.size() - 1);
  for (std::size_t j = 0; j + 1 < m.nodes.size(); ++j) {
    const double hj = m.nodes[j + 1] - m.nodes[j];
    if (!(hj > 0.0))
      throw std::invalid_argument("partition_from_nodes: nodes must strictly increase");
    m.element_lengths[j] = hj;
  }
  m.h = *std::max_element(m.element_lengths.begin(), m.element_lengths.end());
  return m;
}

MeshPtr share(MeshPartition mesh) {
  return std::make_shared<const MeshPartition>(std::move(mesh));
}

int first_free_node(BoundaryCondition bc) {
  return bc == BoundaryCondition::Neumann ? 0 : 1;
}

int free_node_count(const MeshPartition& mesh, BoundaryCondition bc) {
  const int N = mesh.num_elements();
  switch (bc) {
    case BoundaryCondition::Mixed:
      return N;
    case BoundaryCondition::Dirichlet:
      return N - 1;
    case BoundaryCondition::Neumann:
      return N + 1;
  }
  throw std::invalid_argument("free_node_count: unknown boundary condition");
}

int dof_index(const MeshPartition& mesh, BoundaryCondition bc, int node) {
  if (node < 0 || node > mesh.num_elements()) return -1;
  const int d = node - first_free_node(bc);
  if (d < 0 || d >= free_node_count(mesh, bc)) return -1;
  return d;
}

std::vector<double> FemFunction::full_values() const {
  if (!mesh) throw std::invalid_argument("FemFunction: missing mesh");
  const int N = mesh->num_elements();
  if (static_cast<int>(coeffs.size()) != free_node_count(*mesh, bc))
    throw std::invalid_argument("FemFunction: coefficient count does not match mesh/bc");
  std::vector<double> v(N + 1, 0.0);
  const int base = first_free_node(bc);
  for (std::size_t d = 0; d < coeffs.size(); ++d) v[base + d] = coeffs[d];
  return v;
}

FemFunction zero_function(MeshPtr mesh, BoundaryCondition bc) {
  FemFunction f;
  f.bc = bc;
  f.coeffs.assign(free_node_count(*mesh, bc), 0.0);
  f.mesh = std::move(mesh);
  return f;
}

double eval(const FemFunction& f, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("eval: x outside [0,1]");
  const auto& nodes = f.mesh->nodes;
  // Element index: largest j with nodes[j] <= x, clamped to the last element.
  auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  int j = static_cast<int>(it - nodes.begin()) - 1;
  j = std::clamp(j, 0, f.mesh->num_elements() - 1);
  const double t = (x - nodes[j]) / f.mesh->element_lengths[j];
  const auto v = f.full_values();
  return v[j] * (1.0 - t) + v[j + 1] * t;
}

FemFunction project_initial(const std::function<double(double)>& y0, MeshPtr mesh,
                            BoundaryCondition bc) {
  if (bc != BoundaryCondition::Neumann && std::abs(y0(0.0)) > 1e-8)
    std::cerr << "project_initial: warning: y0(0) = " << y0(0.0)
              << " violates the essential condition y(0) = 0\n";
  if (bc == BoundaryCondition::Dirichlet && std::abs(y0(1.0)) > 1e-8)
    std::cerr << "project_initial: warning: y0(1) = " << y0(1.0)
              << " violates the essential condition y(1) = 0\n";

  const int N = mesh->num_elements();
  std::vector<double> load_full(N + 1, 0.0);
  for (int e = 0; e < N; ++e) {
    const double a = mesh->nodes[e];
    const double he = mesh->element_lengths[e];
    for (int q = 0; q < kDataQuadPoints; ++q) {
      const double t = 0.5 * (kGaussX[q] + 1.0);
      const double w = 0.5 * he * kGaussW[q];
      const double v = y0(a + t * he);
      load_full[e] += w * v * (1.0 - t);
      load_full[e + 1] += w * v * t;
    }
  }
  std::vector<double> load(free_node_count(*mesh, bc));
  const int base = first_free_node(bc);
  for (std::size_t d = 0; d < load.size(); ++d) load[d] = load_full[base + d];

  FemFunction f;
  f.bc = bc;
  f.coeffs = solve_tridiagonal(mass_matrix(*mesh, bc), std::move(load));
  f.mesh = std::move(mesh);
  return f;
}

FemFunction nodal_interpolant(const std::function<double(double)>& y0, MeshPtr mesh,
                              BoundaryCondition bc) {
  FemFunction f;
  f.bc = bc;
  const int base = first_free_node(bc);
  const int n = free_node_count(*mesh, bc);
  f.coeffs.resize(n);
  for (int d = 0; d < n; ++d) f.coeffs[d] = y0(mesh->nodes[base + d]);
  f.mesh = std::move(mesh);
  return f;
}

void write_snapshot(const FemFunction& f, std::ostream& out) {
  const auto v = f.full_values();
  char buf[64];
  for (std::size_t j = 0; j < v.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.12g\t%.12g\n", f.mesh->nodes[j], v[j]);
    out << buf;
  }
}

}  // namespace cif
