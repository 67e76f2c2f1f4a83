#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "cif/model.hpp"

namespace cif {

/// Partition 0 = x_0 < x_1 < ... < x_N = 1 of the unit interval.
struct MeshPartition {
  std::vector<double> nodes;            ///< size N+1, strictly increasing
  std::vector<double> element_lengths;  ///< h_j = x_j - x_{j-1}, size N
  double h = 0.0;                       ///< max element length

  int num_elements() const { return static_cast<int>(element_lengths.size()); }
  int num_nodes() const { return static_cast<int>(nodes.size()); }
};

/// Uniform partition with N elements, x_j = j/N. Requires N >= 2.
MeshPartition uniform_partition(int N);

/// Partition from a strictly increasing node list with endpoints 0 and 1.
MeshPartition partition_from_nodes(std::vector<double> nodes);

using MeshPtr = std::shared_ptr<const MeshPartition>;

/// Wraps a partition for shared, immutable use across functions and threads.
MeshPtr share(MeshPartition mesh);

/// Index of the first unconstrained node: 0 for Neumann, 1 otherwise.
int first_free_node(BoundaryCondition bc);

/// Number of unconstrained nodes: Mixed N, Dirichlet N-1, Neumann N+1.
int free_node_count(const MeshPartition& mesh, BoundaryCondition bc);

/// Degree-of-freedom index of a mesh node, or -1 when the node is constrained.
int dof_index(const MeshPartition& mesh, BoundaryCondition bc, int node);

/// Continuous piecewise-linear function on a mesh. `coeffs` holds the values
/// at free nodes only (Mixed: nodes 1..N, Dirichlet: 1..N-1, Neumann: 0..N);
/// constrained nodal values reconstruct as exactly 0.
struct FemFunction {
  MeshPtr mesh;
  BoundaryCondition bc = BoundaryCondition::Mixed;
  std::vector<double> coeffs;

  /// Nodal values at all N+1 nodes, including constrained zeros.
  std::vector<double> full_values() const;
};

FemFunction zero_function(MeshPtr mesh, BoundaryCondition bc);

/// Value of f at x (exact piecewise-linear evaluation). Requires 0 <= x <= 1.
double eval(const FemFunction& f, double x);

/// L2 projection of y0 onto the P1 space: solves M c = (y0, phi_i) with the
/// module-wide data quadrature (5-point Gauss per element). When y0 violates
/// an essential boundary value by more than 1e-8 a warning goes to stderr;
/// the projection itself is well defined regardless.
FemFunction project_initial(const std::function<double(double)>& y0, MeshPtr mesh,
                            BoundaryCondition bc);

/// Nodal interpolant of y0 (samples at free nodes). Unlike the L2 projection
/// this maps discrete eigenvectors of the uniform P1 pencil onto themselves,
/// which the mode-decay verification relies on.
FemFunction nodal_interpolant(const std::function<double(double)>& y0, MeshPtr mesh,
                              BoundaryCondition bc);

/// Writes rows "x<TAB>y" at every node.
void write_snapshot(const FemFunction& f, std::ostream& out);

}  // namespace cif
