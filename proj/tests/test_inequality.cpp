#include "doctest.h"

#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "qc/inequality.hpp"
#include "qc/mesh.hpp"
#include "qc/polybasis.hpp"
#include "qc/quadrature.hpp"

using namespace qc;
using Eigen::Vector3d;

namespace {

// Coefficients of an affine vector field in the broken basis: component d of
// cell t is expanded in the orthonormal reference scalars, so the coefficients
// are plain reference-cell moments of the pulled-back component.
Eigen::VectorXd broken_coefficients(const Mesh& mesh, int degree, const VectorField& field) {
  ScalarPolyBasis basis(degree);
  const int ns = basis.size();
  const QuadRule& rule = tet_rule(degree + 1);
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(3 * ns * mesh.n_tets());
  Eigen::VectorXd vals(ns);
  for (int t = 0; t < mesh.n_tets(); ++t)
    for (int q = 0; q < rule.size(); ++q) {
      const Vector3d ref = rule.points.row(q).transpose();
      basis.eval(ref, vals);
      const Vector3d fx = field(mesh.from_reference(t, ref));
      for (int d = 0; d < 3; ++d)
        coeffs.segment(t * 3 * ns + d * ns, ns) += rule.weights[q] * fx[d] * vals;
    }
  return coeffs;
}

}  // namespace

TEST_CASE("broken forms are symmetric positive definite with the blocked layout") {
  const Mesh mesh = generate_cube_mesh(1);
  const BrokenForms forms = build_broken_forms(mesh, 2);

  // 10 scalars per component, 3 components, 6 cells.
  CHECK(forms.dim == 180);
  CHECK(forms.G.rows() == 180);
  CHECK(forms.M.rows() == 180);

  const double gmax = Eigen::MatrixXd(forms.G).cwiseAbs().maxCoeff();
  const double mmax = Eigen::MatrixXd(forms.M).cwiseAbs().maxCoeff();
  CHECK(Eigen::MatrixXd(SpMat(forms.G - SpMat(forms.G.transpose()))).cwiseAbs().maxCoeff() <=
        1e-12 * gmax);
  CHECK(Eigen::MatrixXd(SpMat(forms.M - SpMat(forms.M.transpose()))).cwiseAbs().maxCoeff() <=
        1e-12 * mmax);

  Eigen::SimplicialLLT<SpMat> gfac(forms.G);
  CHECK(gfac.info() == Eigen::Success);
  // The boundary jump terms make M definite even though curl and divergence
  // alone annihilate constants.
  Eigen::SimplicialLLT<SpMat> mfac(forms.M);
  CHECK(mfac.info() == Eigen::Success);

  CHECK_THROWS_WITH_AS(build_broken_forms(mesh, 0), doctest::Contains("degree"),
                       std::runtime_error);
}

TEST_CASE("rayleigh quotient of an affine field matches closed forms") {
  const Mesh mesh = generate_cube_mesh(1);
  const BrokenForms forms = build_broken_forms(mesh, 2);
  const Eigen::VectorXd x =
      broken_coefficients(mesh, 2, [](const Vector3d& p) { return Vector3d(p.x(), 0, 0); });

  // v = (x,0,0): broken H1 norm squared is 1/3 + 1. The jump form sees
  // div v = 1, no curl, no interior jumps, and the single-sided boundary
  // trace integrates |v|^2 to 7/3 over the six sides, each face diameter
  // sqrt(2).
  const double lhs = x.dot(forms.G * x);
  const double rhs = x.dot(forms.M * x);
  CHECK(lhs == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(rhs == doctest::Approx(1.0 + 7.0 / (3.0 * std::sqrt(2.0))).epsilon(1e-12));

  // The best constant dominates this particular quotient.
  const InequalityProbe probe = sobolev_constant(mesh, 2);
  CHECK(probe.constant * probe.constant >= lhs / rhs - 1e-10);
}

TEST_CASE("eigen constant dominates sampled quotients") {
  const Mesh mesh = generate_cube_mesh(1);
  const InequalityProbe eig = sobolev_constant(mesh, 2);
  CHECK(eig.inequality == "sobolev_broken_h1");
  CHECK(eig.method == "eigen");
  CHECK(eig.n == 0);
  CHECK(eig.samples == 0);
  CHECK(eig.constant > 0.0);

  const InequalityProbe sam = sobolev_sampled(mesh, 2, 50, 11);
  CHECK(sam.inequality == "sobolev_broken_h1");
  CHECK(sam.method == "sampling");
  CHECK(sam.samples == 50);
  CHECK(sam.constant > 0.0);
  CHECK(sam.constant <= eig.constant * (1.0 + 1e-10));

  CHECK_THROWS_WITH_AS(sobolev_sampled(mesh, 2, 0, 1), doctest::Contains("sample"),
                       std::runtime_error);
}

TEST_CASE("lanczos path reproduces the dense eigenvalue") {
  // Degree 3 on the n = 2 mesh gives dimension 2880, past the dense cutoff,
  // so sobolev_constant takes the Lanczos path; the test redoes the solve
  // densely.
  const Mesh mesh = generate_cube_mesh(2);
  const BrokenForms forms = build_broken_forms(mesh, 3);
  REQUIRE(forms.dim == 2880);

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
      Eigen::MatrixXd(forms.G), Eigen::MatrixXd(forms.M),
      Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  REQUIRE(ges.info() == Eigen::Success);
  const double dense = std::sqrt(ges.eigenvalues()(forms.dim - 1));

  const InequalityProbe probe = sobolev_constant(mesh, 3);
  CHECK(probe.constant == doctest::Approx(dense).epsilon(1e-6));
}

TEST_CASE("gradient-orthogonal probe projects onto divergence-free fields") {
  const Mesh mesh = generate_cube_mesh(1);
  const InequalityProbe probe = l3_gradient_orthogonal_probe(mesh, 1, 50, 5);
  CHECK(probe.inequality == "l3_gradient_orthogonal");
  CHECK(probe.method == "sampling");
  CHECK(probe.samples == 50);
  CHECK(probe.constant > 0.0);

  // The projection the probe applies sends any coefficient vector to one the
  // divergence form cannot see: B (x - R K^{-1} B x) = 0 because the gradient
  // representation R turns stiffness moments back into divergence moments.
  const FESpace E = build_hcurl_space(mesh, 2);
  const FESpace Q = build_lagrange_space(mesh, 3);
  const SpMat B = assemble_b(E, Q);
  const SpMat K = assemble_scalar_stiffness(Q);
  Eigen::SimplicialLDLT<SpMat> Kfac(K);
  REQUIRE(Kfac.info() == Eigen::Success);

  std::mt19937 gen(17);
  std::normal_distribution<double> dist;
  Eigen::VectorXd x(E.n_free);
  for (int i = 0; i < E.n_free; ++i) x[i] = dist(gen);
  const Eigen::VectorXd sigma = Kfac.solve(B * x);
  const Eigen::VectorXd grad_part =
      restrict_free(E, gradient_representation(E, Q, expand_free(Q, sigma)));
  CHECK((B * (x - grad_part)).norm() <= 1e-8 * (B * x).norm());

  CHECK_THROWS_WITH_AS(l3_gradient_orthogonal_probe(mesh, 1, 5, 1),
                       doctest::Contains("at least 10"), std::runtime_error);
}

TEST_CASE("coercivity margin is positive and grows with the penalty") {
  const Mesh mesh = generate_cube_mesh(1);
  const double m5 = coercivity_margin(mesh, 1, 5.0);
  const double m20 = coercivity_margin(mesh, 1, 20.0);
  const double m80 = coercivity_margin(mesh, 1, 80.0);

  CHECK(m20 > 0.0);
  CHECK(m5 <= m20 * (1.0 + 1e-10));
  CHECK(m20 <= m80 * (1.0 + 1e-10));
}
