#include "qc/polybasis.hpp"

#include <stdexcept>

namespace qc {

namespace {

double tet_monomial_integral(int a, int b, int c) {
  // a! b! c! / (a+b+c+3)! evaluated without large factorials.
  double value = 1.0;
  int denom_arg = a;
  for (int i = 1; i <= b; ++i) value *= double(i) / double(++denom_arg);
  for (int i = 1; i <= c; ++i) value *= double(i) / double(++denom_arg);
  for (int i = 0; i < 3; ++i) value /= double(++denom_arg);
  return value;
}

double int_pow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

}  // namespace

ScalarPolyBasis::ScalarPolyBasis(int degree) : degree_(degree) {
  if (degree < 0 || degree > 10) throw std::runtime_error("ScalarPolyBasis: degree out of range");
  for (int total = 0; total <= degree; ++total)
    for (int a = total; a >= 0; --a)
      for (int b = total - a; b >= 0; --b)
        exponents_.push_back({a, b, total - a - b});

  const int n = size();
  Eigen::MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      gram(i, j) = tet_monomial_integral(exponents_[i][0] + exponents_[j][0],
                                         exponents_[i][1] + exponents_[j][1],
                                         exponents_[i][2] + exponents_[j][2]);

  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("ScalarPolyBasis: monomial Gram matrix not positive definite");
  // gram = L L^T; rows of L^-1 give orthonormal combinations of the monomials.
  coeff_ = llt.matrixL().solve(Eigen::MatrixXd::Identity(n, n));
}

void ScalarPolyBasis::monomials(const Eigen::Vector3d& xhat, Eigen::VectorXd& m,
                                Eigen::MatrixXd* dm, std::vector<Eigen::Matrix3d>* ddm) const {
  const int n = size();
  m.resize(n);
  if (dm) dm->resize(n, 3);
  if (ddm) ddm->assign(n, Eigen::Matrix3d::Zero());

  for (int i = 0; i < n; ++i) {
    const auto [a, b, c] = exponents_[i];
    const double xa = int_pow(xhat[0], a), yb = int_pow(xhat[1], b), zc = int_pow(xhat[2], c);
    m[i] = xa * yb * zc;
    if (!dm && !ddm) continue;

    const double dxa = a > 0 ? a * int_pow(xhat[0], a - 1) : 0.0;
    const double dyb = b > 0 ? b * int_pow(xhat[1], b - 1) : 0.0;
    const double dzc = c > 0 ? c * int_pow(xhat[2], c - 1) : 0.0;
    if (dm) {
      (*dm)(i, 0) = dxa * yb * zc;
      (*dm)(i, 1) = xa * dyb * zc;
      (*dm)(i, 2) = xa * yb * dzc;
    }
    if (ddm) {
      const double ddxa = a > 1 ? a * (a - 1) * int_pow(xhat[0], a - 2) : 0.0;
      const double ddyb = b > 1 ? b * (b - 1) * int_pow(xhat[1], b - 2) : 0.0;
      const double ddzc = c > 1 ? c * (c - 1) * int_pow(xhat[2], c - 2) : 0.0;
      Eigen::Matrix3d& H = (*ddm)[i];
      H(0, 0) = ddxa * yb * zc;
      H(1, 1) = xa * ddyb * zc;
      H(2, 2) = xa * yb * ddzc;
      H(0, 1) = H(1, 0) = dxa * dyb * zc;
      H(0, 2) = H(2, 0) = dxa * yb * dzc;
      H(1, 2) = H(2, 1) = xa * dyb * dzc;
    }
  }
}

void ScalarPolyBasis::eval(const Eigen::Vector3d& xhat, Eigen::VectorXd& values) const {
  Eigen::VectorXd m;
  monomials(xhat, m, nullptr, nullptr);
  values = coeff_ * m;
}

void ScalarPolyBasis::eval(const Eigen::Vector3d& xhat, Eigen::VectorXd& values,
                           Eigen::MatrixXd& gradients) const {
  Eigen::VectorXd m;
  Eigen::MatrixXd dm;
  monomials(xhat, m, &dm, nullptr);
  values = coeff_ * m;
  gradients = coeff_ * dm;
}

void ScalarPolyBasis::eval(const Eigen::Vector3d& xhat, Eigen::VectorXd& values,
                           Eigen::MatrixXd& gradients, std::vector<Eigen::Matrix3d>& hessians) const {
  Eigen::VectorXd m;
  Eigen::MatrixXd dm;
  std::vector<Eigen::Matrix3d> ddm;
  monomials(xhat, m, &dm, &ddm);
  values = coeff_ * m;
  gradients = coeff_ * dm;

  const int n = size();
  hessians.assign(n, Eigen::Matrix3d::Zero());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double w = coeff_(i, j);
      if (w != 0.0) hessians[i] += w * ddm[j];
    }
}

}  // namespace qc
