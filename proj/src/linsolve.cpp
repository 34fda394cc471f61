#include "qc/linsolve.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include <Eigen/SparseLU>

namespace qc {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Clock = std::chrono::steady_clock;

SpMat assemble_block_system(const SpMat& A, const SpMat& B) {
  const int nu = static_cast<int>(A.rows());
  const int np = static_cast<int>(B.rows());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(A.nonZeros() + 2 * B.nonZeros());
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it)
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int k = 0; k < B.outerSize(); ++k)
    for (SpMat::InnerIterator it(B, k); it; ++it) {
      trips.emplace_back(nu + static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
      trips.emplace_back(static_cast<int>(it.col()), nu + static_cast<int>(it.row()), it.value());
    }
  SpMat S(nu + np, nu + np);
  S.setFromTriplets(trips.begin(), trips.end());
  S.makeCompressed();
  return S;
}

double block_residual(const SpMat& A, const SpMat& B, const Eigen::VectorXd& F,
                      const Eigen::VectorXd& u, const Eigen::VectorXd& p) {
  const Eigen::VectorXd r1 = A * u + B.transpose() * p - F;
  const Eigen::VectorXd r2 = B * u;
  const double scale = std::max(F.norm(), 1e-300);
  return std::sqrt(r1.squaredNorm() + r2.squaredNorm()) / scale;
}

// Preconditioned MINRES with a positive diagonal preconditioner, following
// the classic Paige-Saunders recurrence. Returns the iteration count.
int minres(const SpMat& S, const Eigen::VectorXd& b, const Eigen::VectorXd& inv_diag,
           double tol, int max_it, Eigen::VectorXd& x) {
  const int n = static_cast<int>(b.size());
  x.setZero(n);

  Eigen::VectorXd r1 = b;
  Eigen::VectorXd y = inv_diag.cwiseProduct(r1);
  double beta1 = r1.dot(y);
  if (beta1 <= 0.0) return 0;
  beta1 = std::sqrt(beta1);

  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  Eigen::VectorXd r2 = r1;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n), w2 = Eigen::VectorXd::Zero(n);

  int it = 0;
  for (it = 1; it <= max_it; ++it) {
    const Eigen::VectorXd v = y / beta;
    y = S * v;
    if (it >= 2) y -= (beta / oldb) * r1;
    const double alfa = v.dot(y);
    y -= (alfa / beta) * r2;
    r1 = r2;
    r2 = y;
    y = inv_diag.cwiseProduct(r2);
    oldb = beta;
    const double beta2 = r2.dot(y);
    if (beta2 < 0.0) throw std::runtime_error("minres: preconditioner lost positivity");
    beta = std::sqrt(beta2);

    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    double gamma = std::sqrt(gbar * gbar + beta * beta);
    gamma = std::max(gamma, 1e-300);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    const Eigen::VectorXd w1 = w2;
    w2 = w;
    w = (v - oldeps * w1 - delta * w2) / gamma;
    x += phi * w;

    if (phibar <= tol * beta1) break;
  }
  return std::min(it, max_it);
}

}  // namespace

SaddleSolution solve_saddle(const SpMat& A, const SpMat& B, const Eigen::VectorXd& F,
                            const SolveOptions& opts) {
  const int nu = static_cast<int>(A.rows());
  const int np = static_cast<int>(B.rows());
  if (A.cols() != nu || B.cols() != nu || F.size() != nu)
    throw std::runtime_error("solve_saddle: inconsistent block dimensions");

  const auto t0 = Clock::now();
  const SpMat S = assemble_block_system(A, B);
  Eigen::VectorXd rhs(nu + np);
  rhs.head(nu) = F;
  rhs.tail(np).setZero();

  SaddleSolution sol;
  sol.report.n_u = nu;
  sol.report.n_p = np;
  sol.report.nnz = static_cast<long>(S.nonZeros());

  Eigen::VectorXd x;
  if (opts.method == SolveMethod::Direct) {
    sol.report.method = "direct";
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(S);
    lu.factorize(S);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error(
          "solve_saddle: factorization failed; the system looks singular "
          "(a larger jump penalty usually cures this)");
    x = lu.solve(rhs);
    // One refinement step mops up the usual factorization roundoff.
    x += lu.solve(rhs - S * x);
  } else {
    sol.report.method = "minres";
    Eigen::VectorXd diag(nu + np);
    diag.head(nu) = A.diagonal();
    if (opts.p_precond_diag.size() == np)
      diag.tail(np) = opts.p_precond_diag;
    else
      diag.tail(np).setOnes();
    // A vanishes on discrete gradients, so parts of its diagonal are zero up
    // to roundoff. Inverting those entries would let them dominate the
    // preconditioned norm, so each block is floored relative to its largest
    // entry instead.
    const auto floor_block = [](Eigen::Ref<Eigen::VectorXd> d) {
      const double dmax = d.size() > 0 ? d.maxCoeff() : 0.0;
      if (dmax <= 1e-300) {
        d.setOnes();
        return;
      }
      d = d.cwiseMax(1e-4 * dmax);
    };
    floor_block(diag.head(nu));
    floor_block(diag.tail(np));
    const Eigen::VectorXd inv_diag = diag.cwiseInverse();
    sol.report.iterations = minres(S, rhs, inv_diag, 0.01 * opts.tol, opts.max_iterations, x);
  }

  sol.u = x.head(nu);
  sol.p = x.tail(np);
  sol.report.rel_residual = block_residual(A, B, F, sol.u, sol.p);
  sol.report.converged = sol.report.rel_residual <= opts.tol;
  sol.report.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!sol.report.converged) {
    char buf[96];
    std::snprintf(buf, sizeof(buf),
                  "solve_saddle: relative residual %.3e misses the requested "
                  "tolerance %.3e",
                  sol.report.rel_residual, opts.tol);
    throw std::runtime_error(buf);
  }
  return sol;
}

}  // namespace qc
