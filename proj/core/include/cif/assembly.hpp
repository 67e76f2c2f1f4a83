#pragma once

#include <optional>
#include <vector>

#include "cif/interpolants.hpp"
#include "cif/linalg.hpp"
#include "cif/mesh.hpp"
#include "cif/model.hpp"

namespace cif {

/// Mass matrix M_ij = (phi_j, phi_i) over free nodes. Uniform meshes give
/// diag 2h/3 (h/3 at a free boundary node) and off-diagonals h/6.
TridiagonalMatrix mass_matrix(const MeshPartition& mesh, BoundaryCondition bc);

/// Stiffness matrix A_ij = (phi_j', phi_i') over free nodes. Uniform meshes
/// give diag 2/h (1/h at a free boundary node) and off-diagonals -1/h.
TridiagonalMatrix stiffness_matrix(const MeshPartition& mesh, BoundaryCondition bc);

/// b_i = (y^3, phi_i) by 3-point Gauss per element — exact, the integrand is a
/// degree-4 polynomial per element. The cubic coefficient delta is applied by
/// the caller so one assembly serves parameter sweeps.
std::vector<double> cubic_term(const FemFunction& y);

/// J_ij = 3 (y^2 phi_j, phi_i) by 3-point Gauss per element (exact); the
/// derivative of cubic_term. delta is applied by the caller.
TridiagonalMatrix cubic_jacobian(const FemFunction& y);

/// Feedback coupling B_ij = (I_h(phi_j), phi_i) in solver form. For the
/// piecewise-constant interpolants B is banded (tridiagonal when the
/// observation partition is the mesh partition; bandwidth grows with interval
/// coarsening). For Fourier modes B = G^T G with G the eigenfunction load
/// vectors, kept in factored form so Newton systems solve via the Woodbury
/// identity. The gain mu is applied by the caller.
struct FeedbackOperator {
  int n = 0;
  std::optional<BandedMatrix> banded;             ///< piecewise-constant kinds
  std::vector<std::vector<double>> lowrank_rows;  ///< Fourier: rows g_m of G

  std::vector<double> apply(const std::vector<double>& c) const;
  SparseMatrix to_sparse() const;

  /// Band half-width of the banded part (0 when the operator is low-rank only).
  int bandwidth() const;
};

FeedbackOperator feedback_operator(const InterpolantSpec& spec, const MeshPartition& mesh,
                                   BoundaryCondition bc);

/// Materialized feedback matrix B_ij = (I_h(phi_j), phi_i), so that B*coeffs
/// equals the load vector (I_h(y_h), phi_i) exactly for every y_h in S_h.
SparseMatrix feedback_matrix(const InterpolantSpec& spec, const MeshPartition& mesh,
                             BoundaryCondition bc);

}  // namespace cif
