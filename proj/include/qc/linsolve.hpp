#ifndef QC_LINSOLVE_HPP
#define QC_LINSOLVE_HPP

#include <string>

#include <Eigen/Sparse>

namespace qc {

enum class SolveMethod { Direct, Minres };

struct SolveOptions {
  SolveMethod method = SolveMethod::Direct;
  double tol = 1e-10;
  int max_iterations = 200000;
  // Positive surrogate diagonal for the multiplier block of the MINRES
  // preconditioner (typically the multiplier-space stiffness diagonal).
  Eigen::VectorXd p_precond_diag;
};

struct SolveReport {
  std::string method;
  bool converged = false;
  int iterations = 0;
  double rel_residual = 0.0;
  int n_u = 0;
  int n_p = 0;
  long nnz = 0;
  double seconds = 0.0;
};

struct SaddleSolution {
  Eigen::VectorXd u;
  Eigen::VectorXd p;
  SolveReport report;
};

/// Solve the saddle point system
///   [A  B^T] [u]   [F]
///   [B   0 ] [p] = [0]
/// either by a sparse LU factorization of the assembled block matrix or by
/// preconditioned MINRES. The reported residual is always recomputed from
/// the original blocks; if it misses `tol` the solver throws rather than
/// returning a silently bad solution.
SaddleSolution solve_saddle(const Eigen::SparseMatrix<double>& A,
                            const Eigen::SparseMatrix<double>& B, const Eigen::VectorXd& F,
                            const SolveOptions& opts = {});

}  // namespace qc

#endif
