#include "qc/quadrature.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace qc {

namespace {

// Gauss nodes/weights from the symmetric tridiagonal Jacobi matrix of the
// orthogonal polynomial recurrence (Golub-Welsch). `diag`/`offdiag` describe
// the recurrence on [-1,1]; `mu0` is the integral of the weight function.
void golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag, double mu0,
                  Eigen::VectorXd& points, Eigen::VectorXd& weights) {
  const int m = static_cast<int>(diag.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    J(i, i) = diag[i];
    if (i + 1 < m) J(i, i + 1) = J(i + 1, i) = offdiag[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  points = es.eigenvalues();
  weights.resize(m);
  for (int i = 0; i < m; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    weights[i] = mu0 * v0 * v0;
  }
}

// Gauss-Jacobi rule on [0,1] for the weight (1-x)^alpha, beta = 0.
void gauss_jacobi01(int m, int alpha, Eigen::VectorXd& points, Eigen::VectorXd& weights) {
  const double a = alpha;
  Eigen::VectorXd diag(m), offdiag(m > 1 ? m - 1 : 0);
  for (int k = 0; k < m; ++k) {
    // a_0 = (beta-alpha)/(alpha+beta+2); general term with beta = 0.
    diag[k] = k == 0 ? -a / (a + 2.0) : -a * a / ((2.0 * k + a) * (2.0 * k + a + 2.0));
  }
  for (int k = 1; k < m; ++k) {
    const double den = (2.0 * k + a) * (2.0 * k + a);
    offdiag[k - 1] = std::sqrt(4.0 * k * k * (k + a) * (k + a) / (den * (den - 1.0)));
  }
  const double mu0 = std::pow(2.0, a + 1.0) / (a + 1.0);
  golub_welsch(diag, offdiag, mu0, points, weights);
  // Map [-1,1] with weight (1-t)^alpha to [0,1] with weight (1-x)^alpha:
  // x = (1+t)/2 absorbs a factor 2^-(alpha+1) into the weights.
  const double scale = std::pow(0.5, a + 1.0);
  for (int i = 0; i < m; ++i) {
    points[i] = 0.5 * (1.0 + points[i]);
    weights[i] *= scale;
  }
}

}  // namespace

void gauss_legendre(int m, Eigen::VectorXd& points, Eigen::VectorXd& weights) {
  if (m < 1) throw std::runtime_error("gauss_legendre: need at least one point");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(m), offdiag(m > 1 ? m - 1 : 0);
  for (int k = 1; k < m; ++k) offdiag[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  golub_welsch(diag, offdiag, 2.0, points, weights);
  for (int i = 0; i < m; ++i) {
    points[i] = 0.5 * (1.0 + points[i]);
    weights[i] *= 0.5;
  }
}

namespace {

QuadRule make_triangle_rule(int degree) {
  const int m = degree / 2 + 1;
  Eigen::VectorXd xs, ws, xt, wt;
  gauss_legendre(m, xs, ws);
  gauss_jacobi01(m, 1, xt, wt);

  QuadRule rule;
  rule.dim = 2;
  rule.degree = degree;
  rule.points.resize(m * m, 3);
  rule.weights.resize(m * m);
  int q = 0;
  // Collapsed coordinates: (x,y) = (s(1-t), t), Jacobian (1-t) folded into wt.
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j, ++q) {
      rule.points(q, 0) = xs[i] * (1.0 - xt[j]);
      rule.points(q, 1) = xt[j];
      rule.points(q, 2) = 0.0;
      rule.weights[q] = ws[i] * wt[j];
    }
  return rule;
}

QuadRule make_tet_rule(int degree) {
  const int m = degree / 2 + 1;
  Eigen::VectorXd xs, ws, xt, wt, xr, wr;
  gauss_legendre(m, xs, ws);
  gauss_jacobi01(m, 1, xt, wt);
  gauss_jacobi01(m, 2, xr, wr);

  QuadRule rule;
  rule.dim = 3;
  rule.degree = degree;
  rule.points.resize(m * m * m, 3);
  rule.weights.resize(m * m * m);
  int q = 0;
  // (x,y,z) = (s(1-t)(1-r), t(1-r), r); the (1-t)(1-r)^2 Jacobian lives in wt, wr.
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k, ++q) {
        rule.points(q, 0) = xs[i] * (1.0 - xt[j]) * (1.0 - xr[k]);
        rule.points(q, 1) = xt[j] * (1.0 - xr[k]);
        rule.points(q, 2) = xr[k];
        rule.weights[q] = ws[i] * wt[j] * wr[k];
      }
  return rule;
}

constexpr int kMaxDegree = 14;

}  // namespace

const QuadRule& triangle_rule(int degree) {
  if (degree < 0 || degree > kMaxDegree)
    throw std::runtime_error("triangle_rule: degree " + std::to_string(degree) +
                             " outside supported range [0," + std::to_string(kMaxDegree) + "]");
  static std::vector<QuadRule> cache(kMaxDegree + 1);
  static std::once_flag once;
  std::call_once(once, [] {
    for (int d = 0; d <= kMaxDegree; ++d) cache[d] = make_triangle_rule(d);
  });
  return cache[degree];
}

const QuadRule& tet_rule(int degree) {
  if (degree < 0 || degree > kMaxDegree)
    throw std::runtime_error("tet_rule: degree " + std::to_string(degree) +
                             " outside supported range [0," + std::to_string(kMaxDegree) + "]");
  static std::vector<QuadRule> cache(kMaxDegree + 1);
  static std::once_flag once;
  std::call_once(once, [] {
    for (int d = 0; d <= kMaxDegree; ++d) cache[d] = make_tet_rule(d);
  });
  return cache[degree];
}

}  // namespace qc
