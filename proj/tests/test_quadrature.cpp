#include <cmath>

#include "doctest.h"

#include "qc/polybasis.hpp"
#include "qc/quadrature.hpp"

using namespace qc;

namespace {

// int_That x^a y^b z^c = a! b! c! / (a+b+c+3)!, evaluated without forming
// large factorials.
double tet_monomial(int a, int b, int c) {
  double value = 1.0;
  int denom = 1;
  auto fold = [&](int e) {
    for (int i = 1; i <= e; ++i) value *= double(i) / double(denom++);
  };
  fold(a);
  fold(b);
  fold(c);
  for (int i = 0; i < 3; ++i) value /= double(denom++);
  return value;
}

double tri_monomial(int a, int b) {
  double value = 1.0;
  int denom = 1;
  auto fold = [&](int e) {
    for (int i = 1; i <= e; ++i) value *= double(i) / double(denom++);
  };
  fold(a);
  fold(b);
  for (int i = 0; i < 2; ++i) value /= double(denom++);
  return value;
}

}  // namespace

TEST_CASE("gauss legendre on [0,1]") {
  for (int m = 1; m <= 8; ++m) {
    CAPTURE(m);
    Eigen::VectorXd pts, wts;
    gauss_legendre(m, pts, wts);
    REQUIRE(pts.size() == m);
    for (int i = 0; i < m; ++i) {
      CHECK(pts[i] > 0.0);
      CHECK(pts[i] < 1.0);
      CHECK(wts[i] > 0.0);
    }
    // Exact for all monomials through degree 2m-1, and not for 2m.
    for (int p = 0; p <= 2 * m - 1; ++p) {
      double acc = 0.0;
      for (int i = 0; i < m; ++i) acc += wts[i] * std::pow(pts[i], p);
      CHECK(acc == doctest::Approx(1.0 / (p + 1)).epsilon(1e-13));
    }
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += wts[i] * std::pow(pts[i], 2 * m);
    CHECK(std::abs(acc - 1.0 / (2 * m + 1)) > 1e-10);
  }
}

TEST_CASE("tetrahedron rules integrate monomials exactly") {
  for (int degree = 0; degree <= 14; ++degree) {
    CAPTURE(degree);
    const QuadRule& rule = tet_rule(degree);
    CHECK(rule.dim == 3);
    CHECK(rule.degree >= degree);
    CHECK(rule.weights.sum() == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
    for (int q = 0; q < rule.size(); ++q) {
      CHECK(rule.weights[q] > 0.0);
      const auto p = rule.points.row(q);
      CHECK(p[0] >= 0.0);
      CHECK(p[1] >= 0.0);
      CHECK(p[2] >= 0.0);
      CHECK(p[0] + p[1] + p[2] <= 1.0 + 1e-14);
    }
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b)
        for (int c = 0; a + b + c <= degree; ++c) {
          double acc = 0.0;
          for (int q = 0; q < rule.size(); ++q)
            acc += rule.weights[q] * std::pow(rule.points(q, 0), a) *
                   std::pow(rule.points(q, 1), b) * std::pow(rule.points(q, 2), c);
          CHECK(acc == doctest::Approx(tet_monomial(a, b, c)).epsilon(1e-12));
        }
  }
}

TEST_CASE("triangle rules integrate monomials exactly") {
  for (int degree = 0; degree <= 14; ++degree) {
    CAPTURE(degree);
    const QuadRule& rule = triangle_rule(degree);
    CHECK(rule.dim == 2);
    CHECK(rule.weights.sum() == doctest::Approx(0.5).epsilon(1e-13));
    for (int q = 0; q < rule.size(); ++q) {
      CHECK(rule.weights[q] > 0.0);
      CHECK(rule.points(q, 0) >= 0.0);
      CHECK(rule.points(q, 1) >= 0.0);
      CHECK(rule.points(q, 0) + rule.points(q, 1) <= 1.0 + 1e-14);
      CHECK(rule.points(q, 2) == 0.0);
    }
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b) {
        double acc = 0.0;
        for (int q = 0; q < rule.size(); ++q)
          acc += rule.weights[q] * std::pow(rule.points(q, 0), a) *
                 std::pow(rule.points(q, 1), b);
        CHECK(acc == doctest::Approx(tri_monomial(a, b)).epsilon(1e-12));
      }
  }
}

TEST_CASE("rule degree bounds") {
  CHECK_THROWS_AS(tet_rule(-1), std::runtime_error);
  CHECK_THROWS_AS(tet_rule(15), std::runtime_error);
  CHECK_THROWS_AS(triangle_rule(15), std::runtime_error);
}

TEST_CASE("repeated rule lookups return the same cached object") {
  CHECK(&tet_rule(6) == &tet_rule(6));
  CHECK(&triangle_rule(4) == &triangle_rule(4));
}

TEST_CASE("orthonormal scalar basis") {
  for (int degree : {1, 2, 3, 4}) {
    CAPTURE(degree);
    const ScalarPolyBasis basis(degree);
    const int expected = (degree + 1) * (degree + 2) * (degree + 3) / 6;
    REQUIRE(basis.size() == expected);

    // Gram matrix under a quadrature rule that is exact for the products.
    const QuadRule& rule = tet_rule(2 * degree);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(basis.size(), basis.size());
    Eigen::VectorXd vals(basis.size());
    for (int q = 0; q < rule.size(); ++q) {
      basis.eval(rule.points.row(q).transpose(), vals);
      gram.noalias() += rule.weights[q] * vals * vals.transpose();
    }
    // The monomial Gram is Hilbert-like, so orthonormalization loses a few
    // digits by degree 4.
    CHECK((gram - Eigen::MatrixXd::Identity(basis.size(), basis.size())).cwiseAbs().maxCoeff() <
          1e-10);
  }
}

TEST_CASE("scalar basis derivatives match finite differences") {
  const ScalarPolyBasis basis(3);
  const Eigen::Vector3d x(0.22, 0.31, 0.17);
  const double h = 1e-5;
  Eigen::VectorXd vals(basis.size());
  Eigen::MatrixXd grads(basis.size(), 3);
  std::vector<Eigen::Matrix3d> hess;
  basis.eval(x, vals, grads, hess);

  Eigen::VectorXd vp(basis.size()), vm(basis.size());
  Eigen::MatrixXd gp(basis.size(), 3), gm(basis.size(), 3);
  for (int d = 0; d < 3; ++d) {
    Eigen::Vector3d xp = x, xm = x;
    xp[d] += h;
    xm[d] -= h;
    basis.eval(xp, vp, gp);
    basis.eval(xm, vm, gm);
    for (int i = 0; i < basis.size(); ++i) {
      CHECK(grads(i, d) == doctest::Approx((vp[i] - vm[i]) / (2 * h)).epsilon(1e-7));
      for (int e = 0; e < 3; ++e)
        CHECK(hess[i](e, d) == doctest::Approx((gp(i, e) - gm(i, e)) / (2 * h)).epsilon(1e-6));
    }
  }
}

TEST_CASE("scalar basis spans the monomials") {
  // Project x^2 y z^0, degree 3 basis: the projection of any P_3 polynomial
  // onto the basis must reproduce it pointwise.
  const ScalarPolyBasis basis(3);
  auto f = [](const Eigen::Vector3d& p) { return p[0] * p[0] * p[1] + 0.5 * p[2] - 2.0; };
  const QuadRule& rule = tet_rule(6);
  Eigen::VectorXd coeff = Eigen::VectorXd::Zero(basis.size());
  Eigen::VectorXd vals(basis.size());
  for (int q = 0; q < rule.size(); ++q) {
    basis.eval(rule.points.row(q).transpose(), vals);
    coeff += rule.weights[q] * f(rule.points.row(q).transpose()) * vals;
  }
  const Eigen::Vector3d probe(0.12, 0.4, 0.3);
  basis.eval(probe, vals);
  CHECK(vals.dot(coeff) == doctest::Approx(f(probe)).epsilon(1e-12));
}
