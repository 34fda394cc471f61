#ifndef QC_FORMS_HPP
#define QC_FORMS_HPP

#include <string>

#include <Eigen/Sparse>

#include "qc/manufactured.hpp"
#include "qc/spaces.hpp"

namespace qc {

using SpMat = Eigen::SparseMatrix<double>;

/// Parameters of the interior penalty discretization. `k` is the method
/// order: the velocity space has degree k+1 and the multiplier space degree
/// k+2. `symmetric` selects the sign of the adjoint consistency term.
struct SchemeParams {
  int k = 1;
  double tau = 20.0;
  bool symmetric = true;
};

double default_tau(int k);

/// Stiffness-like operator of the velocity block on the free dofs:
/// broken (curl curl u, curl curl v) volume terms, the consistency term
/// -<{curl curl u}, n x [curl v]> and its adjoint (sign per `symmetric`),
/// and the jump penalty (tau / h_F) <n x [curl u], n x [curl v]>.
/// Face sums run over all faces; on boundary faces the average is the
/// one-sided trace and the jump is the trace itself.
SpMat assemble_a(const FESpace& E, const SchemeParams& prm);

/// Constraint operator on free dofs: B(q, v) = (v, grad q).
SpMat assemble_b(const FESpace& E, const FESpace& Q);

/// Load vector (f, v) on the free dofs of E, integrated by a composite
/// high-order rule so that pairings that vanish analytically (for example a
/// divergence-free f against discrete gradients) vanish to near solver
/// accuracy even on coarse meshes.
Eigen::VectorXd assemble_load(const FESpace& E, const VectorField& f);

/// Mass matrix over all dofs (not just free ones).
SpMat assemble_mass(const FESpace& space);

/// Stiffness matrix (grad q, grad r) of a Lagrange space on its free dofs.
SpMat assemble_scalar_stiffness(const FESpace& Q);
Eigen::VectorXd scalar_stiffness_diagonal(const FESpace& Q);

/// Mesh-dependent norm of a velocity-space function given by full-length
/// coefficients: L2, curl, broken curl-curl and scaled tangential jump terms.
double triple_norm(const FESpace& E, const Eigen::VectorXd& full, double tau);

/// Gram matrix of the mesh-dependent norm on the free dofs.
SpMat triple_norm_matrix(const FESpace& E, double tau);

/// Coordinate-format MatrixMarket export with full double precision.
void write_matrix_market(const SpMat& M, const std::string& path);

}  // namespace qc

#endif
