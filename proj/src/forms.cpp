#include "qc/forms.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qc {

namespace {

// Curl-curl columns derived from the curl Jacobian table of eval_vector.
// Each 3x3 Jacobian block is stored column-major: entry (r,c) of point q sits
// in row 9q + 3c + r.
void curlcurl_table(const Eigen::MatrixXd& curl_jacs, Eigen::MatrixXd& cc) {
  const int nloc = static_cast<int>(curl_jacs.cols());
  const int np = static_cast<int>(curl_jacs.rows()) / 9;
  cc.resize(3 * np, nloc);
  for (int q = 0; q < np; ++q)
    for (int j = 0; j < nloc; ++j) {
      cc(3 * q + 0, j) = curl_jacs(9 * q + 5, j) - curl_jacs(9 * q + 7, j);
      cc(3 * q + 1, j) = curl_jacs(9 * q + 6, j) - curl_jacs(9 * q + 2, j);
      cc(3 * q + 2, j) = curl_jacs(9 * q + 1, j) - curl_jacs(9 * q + 3, j);
    }
}

// Quadrature data of one face in the parametrization spanned by its sorted
// vertex triple: physical points, the area scale, and for each incident cell
// the same points in that cell's reference coordinates.
struct FaceQuad {
  std::vector<int> cells;
  double measure = 0.0;  // physical area per unit reference area
  std::vector<RefPoints> ref;
};

FaceQuad face_quad(const Mesh& mesh, int f, const QuadRule& rule) {
  const FaceInfo& face = mesh.faces[f];
  const Eigen::Vector3d a = mesh.vertices[face.vertices[0]];
  const Eigen::Vector3d t1 = mesh.vertices[face.vertices[1]] - a;
  const Eigen::Vector3d t2 = mesh.vertices[face.vertices[2]] - a;

  FaceQuad fq;
  fq.cells.push_back(face.owner);
  if (!face.is_boundary()) fq.cells.push_back(face.neighbor);
  fq.measure = t1.cross(t2).norm();

  const int np = rule.size();
  for (int cell : fq.cells) {
    const Eigen::Matrix3d Jinv = mesh.jacobian(cell).inverse();
    const Eigen::Vector3d v0 = mesh.vertices[mesh.tets[cell][0]];
    RefPoints ref(np, 3);
    for (int q = 0; q < np; ++q) {
      const Eigen::Vector3d x = a + rule.points(q, 0) * t1 + rule.points(q, 1) * t2;
      ref.row(q) = (Jinv * (x - v0)).transpose();
    }
    fq.ref.push_back(std::move(ref));
  }
  return fq;
}

// n x (curl basis) columns, with a weighted copy for quadrature sums.
void normal_cross_table(const Eigen::MatrixXd& curls, const Eigen::Vector3d& n,
                        Eigen::MatrixXd& nc) {
  const int nloc = static_cast<int>(curls.cols());
  const int np = static_cast<int>(curls.rows()) / 3;
  nc.resize(3 * np, nloc);
  for (int q = 0; q < np; ++q)
    for (int j = 0; j < nloc; ++j) {
      const Eigen::Vector3d c = curls.block<3, 1>(3 * q, j);
      nc.block<3, 1>(3 * q, j) = n.cross(c);
    }
}

void scale_point_blocks(const Eigen::MatrixXd& in, const Eigen::VectorXd& w, double factor,
                        Eigen::MatrixXd& out) {
  out = in;
  const int np = static_cast<int>(w.size());
  for (int q = 0; q < np; ++q) out.middleRows(3 * q, 3) *= factor * w[q];
}

void scatter(const FESpace& rows_space, const std::vector<int>& rows,
             const FESpace& cols_space, const std::vector<int>& cols, const Eigen::MatrixXd& M,
             std::vector<Eigen::Triplet<double>>& trips) {
  for (size_t i = 0; i < rows.size(); ++i) {
    const int ri = rows_space.free_index[rows[i]];
    if (ri < 0) continue;
    for (size_t j = 0; j < cols.size(); ++j) {
      const int cj = cols_space.free_index[cols[j]];
      if (cj < 0) continue;
      trips.emplace_back(ri, cj, M(i, j));
    }
  }
}

void scatter_all(const std::vector<int>& rows, const std::vector<int>& cols,
                 const Eigen::MatrixXd& M, std::vector<Eigen::Triplet<double>>& trips) {
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) trips.emplace_back(rows[i], cols[j], M(i, j));
}

// Composite rule for load integrands: the top Gauss rule applied on each of
// the eight children of one uniform (red) refinement of the reference cell.
// The manufactured loads oscillate on the scale of the whole domain, and on
// coarse cells a single rule leaves enough error in the (f, grad q) pairings
// to hand the discrete multiplier a spurious nonzero value; one refinement of
// the integration cells pushes that error to roughly solver accuracy.
const QuadRule& load_rule() {
  static const QuadRule composite = [] {
    const QuadRule& base = tet_rule(14);
    const Eigen::Vector3d v0(0, 0, 0), v1(1, 0, 0), v2(0, 1, 0), v3(0, 0, 1);
    const Eigen::Vector3d m01 = 0.5 * (v0 + v1), m02 = 0.5 * (v0 + v2), m03 = 0.5 * (v0 + v3),
                          m12 = 0.5 * (v1 + v2), m13 = 0.5 * (v1 + v3), m23 = 0.5 * (v2 + v3);
    const std::array<std::array<Eigen::Vector3d, 4>, 8> children = {{
        {v0, m01, m02, m03},
        {m01, v1, m12, m13},
        {m02, m12, v2, m23},
        {m03, m13, m23, v3},
        {m01, m02, m03, m13},
        {m01, m02, m12, m13},
        {m02, m03, m13, m23},
        {m02, m12, m13, m23},
    }};

    QuadRule r;
    r.dim = 3;
    r.degree = base.degree;
    r.points.resize(8 * base.size(), 3);
    r.weights.resize(8 * base.size());
    int row = 0;
    for (const auto& child : children) {
      Eigen::Matrix3d J;
      for (int c = 0; c < 3; ++c) J.col(c) = child[c + 1] - child[0];
      const double scale = std::abs(J.determinant());
      for (int q = 0; q < base.size(); ++q) {
        r.points.row(row) = (child[0] + J * base.points.row(q).transpose()).transpose();
        r.weights[row] = scale * base.weights[q];
        ++row;
      }
    }
    return r;
  }();
  return composite;
}

}  // namespace

double default_tau(int k) { return k == 1 ? 20.0 : 40.0; }

SpMat assemble_a(const FESpace& E, const SchemeParams& prm) {
  if (E.kind != SpaceKind::HCurl || E.degree != prm.k + 1)
    throw std::runtime_error("assemble_a: velocity space degree must be k+1");
  const Mesh& mesh = *E.mesh;
  const int nloc = E.dofs_per_cell();
  const double adjoint_sign = prm.symmetric ? -1.0 : 1.0;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(mesh.n_tets()) * nloc * nloc +
                static_cast<size_t>(mesh.n_faces()) * 4 * nloc * nloc);

  const QuadRule& vrule = tet_rule(2 * prm.k + 4);
  VectorEval ev;
  Eigen::MatrixXd cc;
  for (int t = 0; t < mesh.n_tets(); ++t) {
    E.eval_vector(t, vrule.points, ev);
    curlcurl_table(ev.curl_jacs, cc);
    const double detJ = 6.0 * mesh.volume(t);
    Eigen::MatrixXd Aloc = Eigen::MatrixXd::Zero(nloc, nloc);
    for (int q = 0; q < vrule.size(); ++q) {
      const auto ccq = cc.middleRows(3 * q, 3);
      Aloc.noalias() += (vrule.weights[q] * detJ) * ccq.transpose() * ccq;
    }
    scatter(E, E.cell_dofs[t], E, E.cell_dofs[t], Aloc, trips);
  }

  const QuadRule& frule = triangle_rule(2 * prm.k + 2);
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const FaceInfo& face = mesh.faces[f];
    const FaceQuad fq = face_quad(mesh, f, frule);
    const int nsides = static_cast<int>(fq.cells.size());
    const double avg = nsides == 2 ? 0.5 : 1.0;
    const double jump_sign[2] = {1.0, -1.0};
    const double penalty = prm.tau / face.diameter;

    std::vector<Eigen::MatrixXd> CC(nsides), NC(nsides), CCw(nsides), NCw(nsides);
    for (int s = 0; s < nsides; ++s) {
      E.eval_vector(fq.cells[s], fq.ref[s], ev);
      curlcurl_table(ev.curl_jacs, CC[s]);
      normal_cross_table(ev.curls, face.normal, NC[s]);
      scale_point_blocks(CC[s], frule.weights, fq.measure, CCw[s]);
      scale_point_blocks(NC[s], frule.weights, fq.measure, NCw[s]);
    }

    for (int ste = 0; ste < nsides; ++ste)
      for (int str = 0; str < nsides; ++str) {
        Eigen::MatrixXd block =
            -avg * jump_sign[ste] * (NCw[ste].transpose() * CC[str]) +
            adjoint_sign * avg * jump_sign[str] * (CCw[ste].transpose() * NC[str]) +
            penalty * jump_sign[ste] * jump_sign[str] * (NCw[ste].transpose() * NC[str]);
        scatter(E, E.cell_dofs[fq.cells[ste]], E, E.cell_dofs[fq.cells[str]], block, trips);
      }
  }

  SpMat A(E.n_free, E.n_free);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();
  return A;
}

SpMat assemble_b(const FESpace& E, const FESpace& Q) {
  if (E.kind != SpaceKind::HCurl || Q.kind != SpaceKind::Lagrange)
    throw std::runtime_error("assemble_b: expects (HCurl, Lagrange) spaces");
  const Mesh& mesh = *E.mesh;
  const QuadRule& rule = tet_rule(E.degree + Q.degree - 1);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(mesh.n_tets()) * E.dofs_per_cell() * Q.dofs_per_cell());

  ScalarEval se;
  Eigen::MatrixXd VV;
  for (int t = 0; t < mesh.n_tets(); ++t) {
    Q.eval_scalar(t, rule.points, se);
    E.eval_vector_values(t, rule.points, VV);
    const double detJ = 6.0 * mesh.volume(t);
    Eigen::MatrixXd Bloc = Eigen::MatrixXd::Zero(Q.dofs_per_cell(), E.dofs_per_cell());
    for (int q = 0; q < rule.size(); ++q)
      Bloc.noalias() += (rule.weights[q] * detJ) * se.gradients.middleRows(3 * q, 3).transpose() *
                        VV.middleRows(3 * q, 3);
    scatter(Q, Q.cell_dofs[t], E, E.cell_dofs[t], Bloc, trips);
  }

  SpMat B(Q.n_free, E.n_free);
  B.setFromTriplets(trips.begin(), trips.end());
  B.makeCompressed();
  return B;
}

Eigen::VectorXd assemble_load(const FESpace& E, const VectorField& f) {
  const Mesh& mesh = *E.mesh;
  const QuadRule& rule = load_rule();
  Eigen::VectorXd F = Eigen::VectorXd::Zero(E.n_free);

  Eigen::MatrixXd VV;
  for (int t = 0; t < mesh.n_tets(); ++t) {
    E.eval_vector_values(t, rule.points, VV);
    const double detJ = 6.0 * mesh.volume(t);
    Eigen::VectorXd Floc = Eigen::VectorXd::Zero(E.dofs_per_cell());
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d x = mesh.from_reference(t, rule.points.row(q).transpose());
      Floc.noalias() +=
          (rule.weights[q] * detJ) * VV.middleRows(3 * q, 3).transpose() * f(x);
    }
    const auto& dofs = E.cell_dofs[t];
    for (size_t i = 0; i < dofs.size(); ++i) {
      const int gi = E.free_index[dofs[i]];
      if (gi >= 0) F[gi] += Floc[i];
    }
  }
  return F;
}

SpMat assemble_mass(const FESpace& space) {
  const Mesh& mesh = *space.mesh;
  const QuadRule& rule = tet_rule(2 * space.degree);
  const int nloc = space.dofs_per_cell();

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(mesh.n_tets()) * nloc * nloc);
  Eigen::MatrixXd VV;
  ScalarEval se;
  for (int t = 0; t < mesh.n_tets(); ++t) {
    const double detJ = 6.0 * mesh.volume(t);
    Eigen::MatrixXd Mloc = Eigen::MatrixXd::Zero(nloc, nloc);
    if (space.kind == SpaceKind::HCurl) {
      space.eval_vector_values(t, rule.points, VV);
      for (int q = 0; q < rule.size(); ++q) {
        const auto vq = VV.middleRows(3 * q, 3);
        Mloc.noalias() += (rule.weights[q] * detJ) * vq.transpose() * vq;
      }
    } else {
      space.eval_scalar(t, rule.points, se);
      for (int q = 0; q < rule.size(); ++q)
        Mloc.noalias() += (rule.weights[q] * detJ) * se.values.row(q).transpose() *
                          se.values.row(q);
    }
    scatter_all(space.cell_dofs[t], space.cell_dofs[t], Mloc, trips);
  }

  SpMat M(space.n_dofs, space.n_dofs);
  M.setFromTriplets(trips.begin(), trips.end());
  M.makeCompressed();
  return M;
}

SpMat assemble_scalar_stiffness(const FESpace& Q) {
  if (Q.kind != SpaceKind::Lagrange)
    throw std::runtime_error("assemble_scalar_stiffness: expects a Lagrange space");
  const Mesh& mesh = *Q.mesh;
  const QuadRule& rule = tet_rule(2 * (Q.degree - 1));
  const int nloc = Q.dofs_per_cell();

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(mesh.n_tets()) * nloc * nloc);
  ScalarEval se;
  for (int t = 0; t < mesh.n_tets(); ++t) {
    Q.eval_scalar(t, rule.points, se);
    const double detJ = 6.0 * mesh.volume(t);
    Eigen::MatrixXd Kloc = Eigen::MatrixXd::Zero(nloc, nloc);
    for (int q = 0; q < rule.size(); ++q) {
      const auto gq = se.gradients.middleRows(3 * q, 3);
      Kloc.noalias() += (rule.weights[q] * detJ) * gq.transpose() * gq;
    }
    scatter(Q, Q.cell_dofs[t], Q, Q.cell_dofs[t], Kloc, trips);
  }

  SpMat K(Q.n_free, Q.n_free);
  K.setFromTriplets(trips.begin(), trips.end());
  K.makeCompressed();
  return K;
}

Eigen::VectorXd scalar_stiffness_diagonal(const FESpace& Q) {
  return assemble_scalar_stiffness(Q).diagonal();
}

double triple_norm(const FESpace& E, const Eigen::VectorXd& full, double tau) {
  const Mesh& mesh = *E.mesh;
  double sq = 0.0;

  const QuadRule& vrule = tet_rule(2 * E.degree);
  VectorEval ev;
  Eigen::MatrixXd cc;
  for (int t = 0; t < mesh.n_tets(); ++t) {
    E.eval_vector(t, vrule.points, ev);
    curlcurl_table(ev.curl_jacs, cc);
    const Eigen::VectorXd loc = E.gather(t, full);
    const double detJ = 6.0 * mesh.volume(t);
    for (int q = 0; q < vrule.size(); ++q) {
      const double w = vrule.weights[q] * detJ;
      sq += w * (ev.values.middleRows(3 * q, 3) * loc).squaredNorm();
      sq += w * (ev.curls.middleRows(3 * q, 3) * loc).squaredNorm();
      sq += w * (cc.middleRows(3 * q, 3) * loc).squaredNorm();
    }
  }

  const QuadRule& frule = triangle_rule(2 * (E.degree - 1));
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const FaceInfo& face = mesh.faces[f];
    const FaceQuad fq = face_quad(mesh, f, frule);
    std::vector<Eigen::VectorXd> side_curl(fq.cells.size());
    for (size_t s = 0; s < fq.cells.size(); ++s) {
      E.eval_vector(fq.cells[s], fq.ref[s], ev);
      side_curl[s] = ev.curls * E.gather(fq.cells[s], full);
    }
    for (int q = 0; q < frule.size(); ++q) {
      Eigen::Vector3d jump = side_curl[0].segment<3>(3 * q);
      if (fq.cells.size() == 2) jump -= side_curl[1].segment<3>(3 * q);
      sq += (tau / face.diameter) * frule.weights[q] * fq.measure *
            face.normal.cross(jump).squaredNorm();
    }
  }
  return std::sqrt(sq);
}

SpMat triple_norm_matrix(const FESpace& E, double tau) {
  const Mesh& mesh = *E.mesh;
  const int nloc = E.dofs_per_cell();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(mesh.n_tets()) * nloc * nloc +
                static_cast<size_t>(mesh.n_faces()) * 4 * nloc * nloc);

  const QuadRule& vrule = tet_rule(2 * E.degree);
  VectorEval ev;
  Eigen::MatrixXd cc;
  for (int t = 0; t < mesh.n_tets(); ++t) {
    E.eval_vector(t, vrule.points, ev);
    curlcurl_table(ev.curl_jacs, cc);
    const double detJ = 6.0 * mesh.volume(t);
    Eigen::MatrixXd Tloc = Eigen::MatrixXd::Zero(nloc, nloc);
    for (int q = 0; q < vrule.size(); ++q) {
      const double w = vrule.weights[q] * detJ;
      const auto vq = ev.values.middleRows(3 * q, 3);
      const auto cq = ev.curls.middleRows(3 * q, 3);
      const auto ccq = cc.middleRows(3 * q, 3);
      Tloc.noalias() += w * vq.transpose() * vq;
      Tloc.noalias() += w * cq.transpose() * cq;
      Tloc.noalias() += w * ccq.transpose() * ccq;
    }
    scatter(E, E.cell_dofs[t], E, E.cell_dofs[t], Tloc, trips);
  }

  const QuadRule& frule = triangle_rule(2 * (E.degree - 1));
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const FaceInfo& face = mesh.faces[f];
    const FaceQuad fq = face_quad(mesh, f, frule);
    const int nsides = static_cast<int>(fq.cells.size());
    const double jump_sign[2] = {1.0, -1.0};
    const double penalty = tau / face.diameter;

    std::vector<Eigen::MatrixXd> NC(nsides), NCw(nsides);
    for (int s = 0; s < nsides; ++s) {
      E.eval_vector(fq.cells[s], fq.ref[s], ev);
      normal_cross_table(ev.curls, face.normal, NC[s]);
      scale_point_blocks(NC[s], frule.weights, fq.measure, NCw[s]);
    }
    for (int ste = 0; ste < nsides; ++ste)
      for (int str = 0; str < nsides; ++str) {
        const Eigen::MatrixXd block = (penalty * jump_sign[ste] * jump_sign[str]) *
                                      (NCw[ste].transpose() * NC[str]);
        scatter(E, E.cell_dofs[fq.cells[ste]], E, E.cell_dofs[fq.cells[str]], block, trips);
      }
  }

  SpMat T(E.n_free, E.n_free);
  T.setFromTriplets(trips.begin(), trips.end());
  T.makeCompressed();
  return T;
}

void write_matrix_market(const SpMat& M, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << M.rows() << " " << M.cols() << " " << M.nonZeros() << "\n";
  char buf[64];
  for (int k = 0; k < M.outerSize(); ++k)
    for (SpMat::InnerIterator it(M, k); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", static_cast<int>(it.row()) + 1,
                    static_cast<int>(it.col()) + 1, it.value());
      out << buf;
    }
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace qc
