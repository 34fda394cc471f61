#include "qc/inequality.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "qc/errors.hpp"
#include "qc/polybasis.hpp"
#include "qc/quadrature.hpp"

namespace qc {

namespace {

constexpr int kDenseLimit = 2000;

// L2 norm of the curl of a coefficient vector in the curl space.
double curl_l2(const FESpace& E, const Eigen::VectorXd& full) {
  const Mesh& mesh = *E.mesh;
  const QuadRule& rule = tet_rule(2 * E.degree);
  double acc = 0.0;
  VectorEval ev;
  for (int t = 0; t < mesh.n_tets(); ++t) {
    E.eval_vector(t, rule.points, ev);
    const Eigen::VectorXd curls = ev.curls * E.gather(t, full);
    const double detJ = 6.0 * mesh.volume(t);
    for (int q = 0; q < rule.size(); ++q)
      acc += rule.weights[q] * detJ * curls.segment<3>(3 * q).squaredNorm();
  }
  return std::sqrt(acc);
}

// Scalar reference basis values at the physical points of a face, seen from
// one incident cell, expanded to the vector basis layout d * ns + s.
Eigen::MatrixXd face_values(const Mesh& mesh, int cell, const ScalarPolyBasis& basis,
                            const Eigen::Vector3d& a, const Eigen::Vector3d& t1,
                            const Eigen::Vector3d& t2, const QuadRule& rule) {
  const int ns = basis.size();
  Eigen::MatrixXd vals(rule.size(), ns);
  Eigen::VectorXd row(ns);
  for (int q = 0; q < rule.size(); ++q) {
    const Eigen::Vector3d x = a + rule.points(q, 0) * t1 + rule.points(q, 1) * t2;
    basis.eval(mesh.to_reference(cell, x), row);
    vals.row(q) = row;
  }
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(3 * rule.size(), 3 * ns);
  for (int q = 0; q < rule.size(); ++q)
    for (int d = 0; d < 3; ++d) N.block(3 * q + d, d * ns, 1, ns) = vals.row(q);
  return N;
}

void scatter_block(std::vector<Eigen::Triplet<double>>& trips, const Eigen::MatrixXd& block,
                   int row0, int col0) {
  for (int i = 0; i < block.rows(); ++i)
    for (int j = 0; j < block.cols(); ++j)
      if (block(i, j) != 0.0) trips.emplace_back(row0 + i, col0 + j, block(i, j));
}

double lanczos_largest(const SpMat& G, const SpMat& M) {
  Eigen::SimplicialLLT<SpMat> Mfac(M);
  if (Mfac.info() != Eigen::Success)
    throw std::runtime_error("sobolev_constant: jump form is not positive definite");

  const int dim = static_cast<int>(G.rows());
  const int maxit = std::min(dim, 400);
  std::vector<Eigen::VectorXd> Q, MQ;
  std::vector<double> alphas, betas;

  std::mt19937 gen(12345);
  std::normal_distribution<double> dist;
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = dist(gen);
  {
    const double nrm = std::sqrt(v.dot(M * v));
    v /= nrm;
  }
  Q.push_back(v);
  MQ.push_back(M * v);

  for (int it = 0; it < maxit; ++it) {
    const Eigen::VectorXd Gq = G * Q[it];
    Eigen::VectorXd w = Mfac.solve(Gq);
    const double alpha = Q[it].dot(Gq);
    alphas.push_back(alpha);
    w -= alpha * Q[it];
    if (it > 0) w -= betas.back() * Q[it - 1];
    for (int pass = 0; pass < 2; ++pass)
      for (size_t j = 0; j < Q.size(); ++j) w -= w.dot(MQ[j]) * Q[j];

    Eigen::VectorXd Mw = M * w;
    const double beta = std::sqrt(std::max(w.dot(Mw), 0.0));

    const int m = static_cast<int>(alphas.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      T(i, i) = alphas[i];
      if (i > 0) T(i, i - 1) = T(i - 1, i) = betas[i - 1];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const double lambda = es.eigenvalues()(m - 1);
    const double tail = std::abs(es.eigenvectors()(m - 1, m - 1));
    if ((beta * tail <= 1e-9 * std::max(lambda, 1e-300) && m >= 10) || beta < 1e-13)
      return lambda;

    betas.push_back(beta);
    Q.push_back(w / beta);
    MQ.push_back(Mw / beta);
  }
  throw std::runtime_error("sobolev_constant: eigenvalue iteration failed to converge");
}

}  // namespace

BrokenForms build_broken_forms(const Mesh& mesh, int degree) {
  if (degree < 1) throw std::runtime_error("build_broken_forms: degree must be at least 1");
  ScalarPolyBasis basis(degree);
  const int ns = basis.size();
  const int nloc = 3 * ns;

  BrokenForms forms;
  forms.dim = nloc * mesh.n_tets();

  std::vector<Eigen::Triplet<double>> gt, mt;
  const QuadRule& vrule = tet_rule(std::max(2 * (degree - 1), 0));
  Eigen::VectorXd vals(ns);
  Eigen::MatrixXd grads(ns, 3);
  for (int t = 0; t < mesh.n_tets(); ++t) {
    const Eigen::Matrix3d Jit = mesh.jacobian(t).inverse().transpose();
    const double detJ = 6.0 * mesh.volume(t);

    // Physical gradients and the derived curl and divergence columns.
    Eigen::MatrixXd stiff = Eigen::MatrixXd::Zero(ns, ns);
    Eigen::MatrixXd mloc = Eigen::MatrixXd::Zero(nloc, nloc);
    for (int q = 0; q < vrule.size(); ++q) {
      basis.eval(vrule.points.row(q).transpose(), vals, grads);
      const Eigen::MatrixXd pg = grads * Jit.transpose();  // row s = physical gradient
      const double w = vrule.weights[q] * detJ;
      stiff.noalias() += w * pg * pg.transpose();

      Eigen::MatrixXd curls(3, nloc);
      Eigen::RowVectorXd divs(nloc);
      for (int d = 0; d < 3; ++d)
        for (int s = 0; s < ns; ++s) {
          const Eigen::Vector3d g = pg.row(s).transpose();
          curls.col(d * ns + s) = g.cross(Eigen::Vector3d::Unit(d));
          divs[d * ns + s] = g[d];
        }
      mloc.noalias() += w * (curls.transpose() * curls + divs.transpose() * divs);
    }

    // The reference scalars are orthonormal, so the cell mass block is
    // detJ times the identity.
    Eigen::MatrixXd gloc = Eigen::MatrixXd::Zero(nloc, nloc);
    for (int d = 0; d < 3; ++d)
      gloc.block(d * ns, d * ns, ns, ns) =
          stiff + detJ * Eigen::MatrixXd::Identity(ns, ns);

    scatter_block(gt, gloc, t * nloc, t * nloc);
    scatter_block(mt, mloc, t * nloc, t * nloc);
  }

  const QuadRule& frule = triangle_rule(2 * degree);
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const FaceInfo& face = mesh.faces[f];
    const Eigen::Vector3d a = mesh.vertices[face.vertices[0]];
    const Eigen::Vector3d t1 = mesh.vertices[face.vertices[1]] - a;
    const Eigen::Vector3d t2 = mesh.vertices[face.vertices[2]] - a;
    const double measure = t1.cross(t2).norm();

    std::vector<int> cells = {face.owner};
    if (!face.is_boundary()) cells.push_back(face.neighbor);
    std::vector<Eigen::MatrixXd> N;
    for (int c : cells) N.push_back(face_values(mesh, c, basis, a, t1, t2, frule));

    Eigen::VectorXd wts(3 * frule.size());
    for (int q = 0; q < frule.size(); ++q)
      wts.segment<3>(3 * q).setConstant(frule.weights[q] * measure / face.diameter);

    const double sgn[2] = {1.0, -1.0};
    for (size_t se = 0; se < cells.size(); ++se)
      for (size_t sr = 0; sr < cells.size(); ++sr) {
        const Eigen::MatrixXd block =
            sgn[se] * sgn[sr] * N[se].transpose() * wts.asDiagonal() * N[sr];
        scatter_block(mt, block, cells[se] * nloc, cells[sr] * nloc);
      }
  }

  forms.G.resize(forms.dim, forms.dim);
  forms.G.setFromTriplets(gt.begin(), gt.end());
  forms.M.resize(forms.dim, forms.dim);
  forms.M.setFromTriplets(mt.begin(), mt.end());
  return forms;
}

InequalityProbe sobolev_constant(const Mesh& mesh, int degree) {
  const BrokenForms forms = build_broken_forms(mesh, degree);
  double lambda = 0.0;
  if (forms.dim <= kDenseLimit) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
        Eigen::MatrixXd(forms.G), Eigen::MatrixXd(forms.M),
        Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    if (ges.info() != Eigen::Success)
      throw std::runtime_error("sobolev_constant: dense eigenvalue solve failed");
    lambda = ges.eigenvalues()(forms.dim - 1);
  } else {
    lambda = lanczos_largest(forms.G, forms.M);
  }
  InequalityProbe probe;
  probe.inequality = "sobolev_broken_h1";
  probe.constant = std::sqrt(lambda);
  probe.method = "eigen";
  return probe;
}

InequalityProbe sobolev_sampled(const Mesh& mesh, int degree, int samples, unsigned seed) {
  if (samples < 1) throw std::runtime_error("sobolev_sampled: need at least one sample");
  const BrokenForms forms = build_broken_forms(mesh, degree);
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist;
  double best = 0.0;
  Eigen::VectorXd x(forms.dim);
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < forms.dim; ++i) x[i] = dist(gen);
    best = std::max(best, x.dot(forms.G * x) / x.dot(forms.M * x));
  }
  InequalityProbe probe;
  probe.inequality = "sobolev_broken_h1";
  probe.constant = std::sqrt(best);
  probe.method = "sampling";
  probe.samples = samples;
  return probe;
}

InequalityProbe l3_gradient_orthogonal_probe(const Mesh& mesh, int k, int samples,
                                             unsigned seed) {
  if (samples < 10)
    throw std::runtime_error("l3_gradient_orthogonal_probe: need at least 10 samples");
  const FESpace E = build_hcurl_space(mesh, k + 1);
  const FESpace Q = build_lagrange_space(mesh, k + 2);
  const SpMat B = assemble_b(E, Q);
  const SpMat K = assemble_scalar_stiffness(Q);
  Eigen::SimplicialLDLT<SpMat> Kfac(K);
  if (Kfac.info() != Eigen::Success)
    throw std::runtime_error("l3_gradient_orthogonal_probe: stiffness factorization failed");

  std::mt19937 gen(seed);
  std::normal_distribution<double> dist;
  double best = 0.0;
  int accepted = 0, attempts = 0;
  Eigen::VectorXd x(E.n_free);
  while (accepted < samples) {
    if (++attempts > 20 * samples)
      throw std::runtime_error("l3_gradient_orthogonal_probe: samples keep projecting to zero");
    for (int i = 0; i < E.n_free; ++i) x[i] = dist(gen);
    const Eigen::VectorXd sigma = Kfac.solve(B * x);
    const Eigen::VectorXd grad_part =
        restrict_free(E, gradient_representation(E, Q, expand_free(Q, sigma)));
    const Eigen::VectorXd v_full = expand_free(E, Eigen::VectorXd(x - grad_part));
    const double curl = curl_l2(E, v_full);
    if (curl < 1e-10 * x.norm()) continue;
    best = std::max(best, lp_norm(E, v_full, 3.0) / curl);
    ++accepted;
  }
  InequalityProbe probe;
  probe.inequality = "l3_gradient_orthogonal";
  probe.constant = best;
  probe.method = "sampling";
  probe.samples = samples;
  return probe;
}

double coercivity_margin(const Mesh& mesh, int k, double tau) {
  const FESpace E = build_hcurl_space(mesh, k + 1);
  const FESpace Q = build_lagrange_space(mesh, k + 2);
  SchemeParams prm;
  prm.k = k;
  prm.tau = tau;
  prm.symmetric = true;

  const Eigen::MatrixXd Bd = Eigen::MatrixXd(assemble_b(E, Q));
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Bd);
  const Eigen::MatrixXd Z = lu.kernel();
  if (Z.cols() == 0 || (Bd * Z).norm() > 1e-8 * Bd.norm() * Z.norm())
    throw std::runtime_error("coercivity_margin: null-space extraction failed");

  const Eigen::MatrixXd Ad = Eigen::MatrixXd(assemble_a(E, prm));
  const Eigen::MatrixXd Td = Eigen::MatrixXd(triple_norm_matrix(E, tau));
  Eigen::MatrixXd Ga = Z.transpose() * Ad * Z;
  Eigen::MatrixXd Tm = Z.transpose() * Td * Z;
  Ga = 0.5 * (Ga + Ga.transpose()).eval();
  Tm = 0.5 * (Tm + Tm.transpose()).eval();

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
      Ga, Tm, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (ges.info() != Eigen::Success)
    throw std::runtime_error("coercivity_margin: reduced eigenvalue solve failed");
  return ges.eigenvalues()(0);
}

}  // namespace qc
