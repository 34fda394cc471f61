#include "qc/spaces.hpp"

#include <stdexcept>

namespace qc {

namespace {

using VecFieldEval = std::function<void(const Eigen::Vector3d&, Eigen::Matrix3Xd&)>;

// Legendre polynomials shifted to [0,1], evaluated through degree `n`.
void shifted_legendre(int n, double s, Eigen::VectorXd& p) {
  p.resize(n + 1);
  const double x = 2.0 * s - 1.0;
  p[0] = 1.0;
  if (n >= 1) p[1] = x;
  for (int k = 1; k < n; ++k) p[k + 1] = ((2 * k + 1) * x * p[k] - k * p[k - 1]) / (k + 1);
}

// Test fields on the reference triangle for the face moments: the
// Raviart-Thomas set [P_{r-1}]^2 + x pt(P_{r-1}) with r = degree - 1.
void face_test_fields(int degree, double xi, double eta, Eigen::Matrix2Xd& q) {
  if (degree == 2) {
    q.resize(2, 3);
    q.col(0) << 1, 0;
    q.col(1) << 0, 1;
    q.col(2) << xi, eta;
  } else {
    q.resize(2, 8);
    q.col(0) << 1, 0;
    q.col(1) << 0, 1;
    q.col(2) << xi, 0;
    q.col(3) << 0, xi;
    q.col(4) << eta, 0;
    q.col(5) << 0, eta;
    q.col(6) << xi * xi, xi * eta;
    q.col(7) << xi * eta, eta * eta;
  }
}

int n_face_moments(int degree) { return degree * degree - 1; }

// Interior test fields (degree 3 only): [P_0]^3 + x P_0.
void interior_test_fields(const Eigen::Vector3d& xhat, Eigen::Matrix3Xd& q) {
  q.resize(3, 4);
  q.col(0) = Eigen::Vector3d::UnitX();
  q.col(1) = Eigen::Vector3d::UnitY();
  q.col(2) = Eigen::Vector3d::UnitZ();
  q.col(3) = xhat;
}

// Moments of a vector field over one edge: integrals of the tangential
// component against Legendre polynomials, taken along the global direction
// from the lower to the higher vertex index. out is (degree+1) x nfields.
void edge_moments(const Mesh& mesh, int edge, int degree, int nfields, const VecFieldEval& ev,
                  Eigen::MatrixXd& out) {
  const Eigen::Vector3d a = mesh.vertices[mesh.edges[edge][0]];
  const Eigen::Vector3d d = mesh.vertices[mesh.edges[edge][1]] - a;

  Eigen::VectorXd pts, wts;
  gauss_legendre(degree + 1, pts, wts);

  out.setZero(degree + 1, nfields);
  Eigen::Matrix3Xd vals(3, nfields);
  Eigen::VectorXd leg;
  for (int q = 0; q < pts.size(); ++q) {
    ev(a + pts[q] * d, vals);
    shifted_legendre(degree, pts[q], leg);
    const Eigen::RowVectorXd tangential = d.transpose() * vals;  // 1 x nfields
    out.noalias() += wts[q] * leg * tangential;
  }
}

// Moments of the in-plane trace of a vector field over one face, in the frame
// spanned by the sorted vertex triple. out is (degree^2 - 1) x nfields.
void face_moments(const Mesh& mesh, int face, int degree, int nfields, const VecFieldEval& ev,
                  Eigen::MatrixXd& out) {
  const auto& fv = mesh.faces[face].vertices;
  const Eigen::Vector3d a = mesh.vertices[fv[0]];
  const Eigen::Vector3d t1 = mesh.vertices[fv[1]] - a;
  const Eigen::Vector3d t2 = mesh.vertices[fv[2]] - a;

  const QuadRule& rule = triangle_rule(2 * degree);
  out.setZero(n_face_moments(degree), nfields);
  Eigen::Matrix3Xd vals(3, nfields);
  Eigen::Matrix2Xd test;
  for (int q = 0; q < rule.size(); ++q) {
    const double xi = rule.points(q, 0), eta = rule.points(q, 1);
    ev(a + xi * t1 + eta * t2, vals);
    face_test_fields(degree, xi, eta, test);
    Eigen::Matrix2Xd trace(2, nfields);
    trace.row(0) = t1.transpose() * vals;
    trace.row(1) = t2.transpose() * vals;
    out.noalias() += rule.weights[q] * test.transpose() * trace;
  }
}

// Interior moments over one cell, paired on the reference cell after a
// covariant pull-back. out is 4 x nfields.
void interior_moments(const Mesh& mesh, int t, int degree, int nfields, const VecFieldEval& ev,
                      Eigen::MatrixXd& out) {
  const Eigen::Matrix3d Jt = mesh.jacobian(t).transpose();
  const QuadRule& rule = tet_rule(2 * degree);
  out.setZero(4, nfields);
  Eigen::Matrix3Xd vals(3, nfields), test;
  for (int q = 0; q < rule.size(); ++q) {
    const Eigen::Vector3d xhat = rule.points.row(q).transpose();
    ev(mesh.from_reference(t, xhat), vals);
    interior_test_fields(xhat, test);
    out.noalias() += rule.weights[q] * test.transpose() * (Jt * vals);
  }
}

void finalize_boundary(FESpace& S) {
  S.free_index.assign(S.n_dofs, -1);
  S.free_dofs.clear();
  for (int g = 0; g < S.n_dofs; ++g) {
    if (S.dof_on_boundary[g]) continue;
    S.free_index[g] = static_cast<int>(S.free_dofs.size());
    S.free_dofs.push_back(g);
  }
  S.n_free = static_cast<int>(S.free_dofs.size());
}

void check_unisolvent(const Eigen::MatrixXd& V, const Eigen::MatrixXd& C, int t) {
  const int n = static_cast<int>(V.rows());
  const double err = (V * C - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (!(err < 1e-8))
    throw std::runtime_error("dof functionals are not unisolvent on cell " + std::to_string(t));
}

}  // namespace

FESpace build_hcurl_space(const Mesh& mesh, int degree) {
  if (degree != 2 && degree != 3)
    throw std::runtime_error("build_hcurl_space: supported degrees are 2 and 3");

  FESpace S;
  S.kind = SpaceKind::HCurl;
  S.degree = degree;
  S.mesh = &mesh;
  S.scalar = std::make_shared<ScalarPolyBasis>(degree);

  S.edge_block = degree + 1;
  S.face_block = n_face_moments(degree);
  S.cell_block = degree == 3 ? 4 : 0;
  S.face_offset = mesh.n_edges() * S.edge_block;
  S.cell_offset = S.face_offset + mesh.n_faces() * S.face_block;
  S.n_dofs = S.cell_offset + mesh.n_tets() * S.cell_block;

  S.dof_on_boundary.assign(S.n_dofs, 0);
  for (int e = 0; e < mesh.n_edges(); ++e)
    if (mesh.edge_on_boundary[e])
      for (int i = 0; i < S.edge_block; ++i) S.dof_on_boundary[e * S.edge_block + i] = 1;
  for (int f = 0; f < mesh.n_faces(); ++f)
    if (mesh.face_on_boundary(f))
      for (int i = 0; i < S.face_block; ++i)
        S.dof_on_boundary[S.face_offset + f * S.face_block + i] = 1;
  finalize_boundary(S);

  const int ns = S.scalar->size();
  const int nloc = 3 * ns;
  S.cell_dofs.resize(mesh.n_tets());
  S.cell_coeff.resize(mesh.n_tets());

  Eigen::VectorXd sv;
  for (int t = 0; t < mesh.n_tets(); ++t) {
    auto& dofs = S.cell_dofs[t];
    dofs.reserve(nloc);
    for (int le = 0; le < 6; ++le) {
      const int e = mesh.tet_to_edges[t][le];
      for (int i = 0; i < S.edge_block; ++i) dofs.push_back(e * S.edge_block + i);
    }
    for (int lf = 0; lf < 4; ++lf) {
      const int f = mesh.tet_to_faces[t][lf];
      for (int i = 0; i < S.face_block; ++i) dofs.push_back(S.face_offset + f * S.face_block + i);
    }
    for (int i = 0; i < S.cell_block; ++i) dofs.push_back(S.cell_offset + t * S.cell_block + i);

    const Eigen::Matrix3d Jit = mesh.jacobian(t).inverse().transpose();
    auto prime_eval = [&](const Eigen::Vector3d& x, Eigen::Matrix3Xd& vals) {
      const Eigen::Vector3d xhat = mesh.to_reference(t, x);
      S.scalar->eval(xhat, sv);
      for (int d = 0; d < 3; ++d)
        for (int s = 0; s < ns; ++s) vals.col(d * ns + s) = Jit.col(d) * sv[s];
    };

    Eigen::MatrixXd V(nloc, nloc), block;
    int row = 0;
    for (int le = 0; le < 6; ++le) {
      edge_moments(mesh, mesh.tet_to_edges[t][le], degree, nloc, prime_eval, block);
      V.middleRows(row, S.edge_block) = block;
      row += S.edge_block;
    }
    for (int lf = 0; lf < 4; ++lf) {
      face_moments(mesh, mesh.tet_to_faces[t][lf], degree, nloc, prime_eval, block);
      V.middleRows(row, S.face_block) = block;
      row += S.face_block;
    }
    if (S.cell_block > 0) {
      interior_moments(mesh, t, degree, nloc, prime_eval, block);
      V.middleRows(row, S.cell_block) = block;
    }

    S.cell_coeff[t] = V.partialPivLu().inverse();
    check_unisolvent(V, S.cell_coeff[t], t);
  }
  return S;
}

FESpace build_lagrange_space(const Mesh& mesh, int degree) {
  if (degree != 3 && degree != 4)
    throw std::runtime_error("build_lagrange_space: supported degrees are 3 and 4");

  FESpace S;
  S.kind = SpaceKind::Lagrange;
  S.degree = degree;
  S.mesh = &mesh;
  S.scalar = std::make_shared<ScalarPolyBasis>(degree);

  const int nv = mesh.n_vertices();
  S.edge_block = degree - 1;
  S.face_block = degree == 3 ? 1 : 3;
  S.cell_block = degree == 3 ? 0 : 1;
  // Vertex nodes occupy [0, nv); the entity blocks follow.
  const int edge_offset = nv;
  S.face_offset = edge_offset + mesh.n_edges() * S.edge_block;
  S.cell_offset = S.face_offset + mesh.n_faces() * S.face_block;
  S.n_dofs = S.cell_offset + mesh.n_tets() * S.cell_block;

  S.nodes.resize(S.n_dofs, 3);
  S.dof_on_boundary.assign(S.n_dofs, 0);
  for (int v = 0; v < nv; ++v) {
    S.nodes.row(v) = mesh.vertices[v].transpose();
    S.dof_on_boundary[v] = mesh.vertex_on_boundary[v];
  }
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Eigen::Vector3d a = mesh.vertices[mesh.edges[e][0]];
    const Eigen::Vector3d b = mesh.vertices[mesh.edges[e][1]];
    for (int i = 1; i < degree; ++i) {
      const int g = edge_offset + e * S.edge_block + (i - 1);
      S.nodes.row(g) = (a + (double(i) / degree) * (b - a)).transpose();
      S.dof_on_boundary[g] = mesh.edge_on_boundary[e];
    }
  }
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const auto& fv = mesh.faces[f].vertices;
    const Eigen::Vector3d c =
        (mesh.vertices[fv[0]] + mesh.vertices[fv[1]] + mesh.vertices[fv[2]]) / 3.0;
    for (int i = 0; i < S.face_block; ++i) {
      const int g = S.face_offset + f * S.face_block + i;
      // Degree 3 places the centroid; degree 4 places the three interior
      // nodes, each shifted towards one vertex of the sorted triple.
      const Eigen::Vector3d node =
          degree == 3 ? c : Eigen::Vector3d(0.75 * c + 0.25 * mesh.vertices[fv[i]]);
      S.nodes.row(g) = node.transpose();
      S.dof_on_boundary[g] = mesh.face_on_boundary(f);
    }
  }
  for (int t = 0; t < mesh.n_tets() * S.cell_block; ++t)
    S.nodes.row(S.cell_offset + t) = mesh.centroid(t).transpose();
  finalize_boundary(S);

  const int nloc = S.scalar->size();
  S.cell_dofs.resize(mesh.n_tets());
  S.cell_coeff.resize(mesh.n_tets());
  Eigen::VectorXd sv;
  for (int t = 0; t < mesh.n_tets(); ++t) {
    auto& dofs = S.cell_dofs[t];
    dofs.reserve(nloc);
    for (int lv = 0; lv < 4; ++lv) dofs.push_back(mesh.tets[t][lv]);
    for (int le = 0; le < 6; ++le) {
      const int e = mesh.tet_to_edges[t][le];
      for (int i = 0; i < S.edge_block; ++i) dofs.push_back(edge_offset + e * S.edge_block + i);
    }
    for (int lf = 0; lf < 4; ++lf) {
      const int f = mesh.tet_to_faces[t][lf];
      for (int i = 0; i < S.face_block; ++i) dofs.push_back(S.face_offset + f * S.face_block + i);
    }
    for (int i = 0; i < S.cell_block; ++i) dofs.push_back(S.cell_offset + t * S.cell_block + i);

    Eigen::MatrixXd V(nloc, nloc);
    for (int i = 0; i < nloc; ++i) {
      const Eigen::Vector3d xhat = mesh.to_reference(t, S.nodes.row(dofs[i]).transpose());
      S.scalar->eval(xhat, sv);
      V.row(i) = sv.transpose();
    }
    S.cell_coeff[t] = V.partialPivLu().inverse();
    check_unisolvent(V, S.cell_coeff[t], t);
  }
  return S;
}

void FESpace::eval_vector(int t, const RefPoints& ref_pts, VectorEval& out) const {
  const int np = static_cast<int>(ref_pts.rows());
  const int ns = scalar->size();
  const int nloc = 3 * ns;
  const Eigen::Matrix3d J = mesh->jacobian(t);
  const Eigen::Matrix3d Jinv = J.inverse();
  const Eigen::Matrix3d Jit = Jinv.transpose();
  const double detJ = J.determinant();

  Eigen::MatrixXd PV(3 * np, nloc), PC(3 * np, nloc), PJ(9 * np, nloc);
  Eigen::VectorXd sv;
  Eigen::MatrixXd sg;
  std::vector<Eigen::Matrix3d> sh;
  for (int q = 0; q < np; ++q) {
    scalar->eval(ref_pts.row(q).transpose(), sv, sg, sh);
    for (int s = 0; s < ns; ++s) {
      const Eigen::Vector3d ghat = sg.row(s).transpose();
      for (int d = 0; d < 3; ++d) {
        const int j = d * ns + s;
        const Eigen::Vector3d ed = Eigen::Vector3d::Unit(d);
        PV.block<3, 1>(3 * q, j) = Jit.col(d) * sv[s];
        PC.block<3, 1>(3 * q, j) = (J * ghat.cross(ed)) / detJ;
        Eigen::Matrix3d W;
        for (int c = 0; c < 3; ++c) W.col(c) = Eigen::Vector3d(sh[s].col(c)).cross(ed);
        const Eigen::Matrix3d G = (J * W * Jinv) / detJ;
        for (int c = 0; c < 3; ++c) PJ.block<3, 1>(9 * q + 3 * c, j) = G.col(c);
      }
    }
  }
  const Eigen::MatrixXd& C = cell_coeff[t];
  out.values.noalias() = PV * C;
  out.curls.noalias() = PC * C;
  out.curl_jacs.noalias() = PJ * C;
}

void FESpace::eval_vector_values(int t, const RefPoints& ref_pts, Eigen::MatrixXd& values) const {
  const int np = static_cast<int>(ref_pts.rows());
  const int ns = scalar->size();
  const int nloc = 3 * ns;
  const Eigen::Matrix3d Jit = mesh->jacobian(t).inverse().transpose();

  Eigen::MatrixXd PV(3 * np, nloc);
  Eigen::VectorXd sv;
  for (int q = 0; q < np; ++q) {
    scalar->eval(ref_pts.row(q).transpose(), sv);
    for (int s = 0; s < ns; ++s)
      for (int d = 0; d < 3; ++d) PV.block<3, 1>(3 * q, d * ns + s) = Jit.col(d) * sv[s];
  }
  values.noalias() = PV * cell_coeff[t];
}

void FESpace::eval_scalar(int t, const RefPoints& ref_pts, ScalarEval& out) const {
  const int np = static_cast<int>(ref_pts.rows());
  const int nprime = scalar->size();
  const Eigen::Matrix3d Jit = mesh->jacobian(t).inverse().transpose();

  Eigen::MatrixXd SV(np, nprime), SG(3 * np, nprime);
  Eigen::VectorXd sv;
  Eigen::MatrixXd sg;
  for (int q = 0; q < np; ++q) {
    scalar->eval(ref_pts.row(q).transpose(), sv, sg);
    SV.row(q) = sv.transpose();
    for (int j = 0; j < nprime; ++j)
      SG.block<3, 1>(3 * q, j) = Jit * sg.row(j).transpose();
  }
  const Eigen::MatrixXd& C = cell_coeff[t];
  out.values.noalias() = SV * C;
  out.gradients.noalias() = SG * C;
}

Eigen::VectorXd FESpace::gather(int t, const Eigen::VectorXd& full) const {
  const auto& dofs = cell_dofs[t];
  Eigen::VectorXd loc(dofs.size());
  for (size_t i = 0; i < dofs.size(); ++i) loc[i] = full[dofs[i]];
  return loc;
}

Eigen::VectorXd expand_free(const FESpace& space, const Eigen::VectorXd& free_vec) {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(space.n_dofs);
  for (int i = 0; i < space.n_free; ++i) full[space.free_dofs[i]] = free_vec[i];
  return full;
}

Eigen::VectorXd restrict_free(const FESpace& space, const Eigen::VectorXd& full_vec) {
  Eigen::VectorXd free_vec(space.n_free);
  for (int i = 0; i < space.n_free; ++i) free_vec[i] = full_vec[space.free_dofs[i]];
  return free_vec;
}

Eigen::VectorXd interpolate(const FESpace& space,
                            const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& field) {
  if (space.kind != SpaceKind::HCurl)
    throw std::runtime_error("interpolate: vector field requires an HCurl space");
  const Mesh& mesh = *space.mesh;
  Eigen::VectorXd out(space.n_dofs);
  auto ev = [&](const Eigen::Vector3d& x, Eigen::Matrix3Xd& vals) { vals.col(0) = field(x); };

  Eigen::MatrixXd block;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    edge_moments(mesh, e, space.degree, 1, ev, block);
    out.segment(e * space.edge_block, space.edge_block) = block.col(0);
  }
  for (int f = 0; f < mesh.n_faces(); ++f) {
    face_moments(mesh, f, space.degree, 1, ev, block);
    out.segment(space.face_offset + f * space.face_block, space.face_block) = block.col(0);
  }
  if (space.cell_block > 0)
    for (int t = 0; t < mesh.n_tets(); ++t) {
      interior_moments(mesh, t, space.degree, 1, ev, block);
      out.segment(space.cell_offset + t * space.cell_block, space.cell_block) = block.col(0);
    }
  return out;
}

Eigen::VectorXd interpolate(const FESpace& space,
                            const std::function<double(const Eigen::Vector3d&)>& field) {
  if (space.kind != SpaceKind::Lagrange)
    throw std::runtime_error("interpolate: scalar field requires a Lagrange space");
  Eigen::VectorXd out(space.n_dofs);
  for (int g = 0; g < space.n_dofs; ++g) out[g] = field(space.nodes.row(g).transpose());
  return out;
}

Eigen::VectorXd gradient_representation(const FESpace& E, const FESpace& Q,
                                        const Eigen::VectorXd& q_full) {
  if (E.kind != SpaceKind::HCurl || Q.kind != SpaceKind::Lagrange)
    throw std::runtime_error("gradient_representation: expects (HCurl, Lagrange) spaces");
  const Mesh& mesh = *E.mesh;

  // Evaluator for grad(q_h) restricted to cell t.
  auto grad_on_cell = [&](int t) -> VecFieldEval {
    const Eigen::Matrix3d Jit = mesh.jacobian(t).inverse().transpose();
    const Eigen::VectorXd w = Q.cell_coeff[t] * Q.gather(t, q_full);
    return [&mesh, &Q, t, Jit, w](const Eigen::Vector3d& x, Eigen::Matrix3Xd& vals) {
      const Eigen::Vector3d xhat = mesh.to_reference(t, x);
      Eigen::VectorXd sv;
      Eigen::MatrixXd sg;
      Q.scalar->eval(xhat, sv, sg);
      vals.col(0) = Jit * (sg.transpose() * w);
    };
  };

  Eigen::VectorXd out(E.n_dofs);
  Eigen::MatrixXd block;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    edge_moments(mesh, e, E.degree, 1, grad_on_cell(mesh.edge_to_tet[e]), block);
    out.segment(e * E.edge_block, E.edge_block) = block.col(0);
  }
  for (int f = 0; f < mesh.n_faces(); ++f) {
    face_moments(mesh, f, E.degree, 1, grad_on_cell(mesh.faces[f].owner), block);
    out.segment(E.face_offset + f * E.face_block, E.face_block) = block.col(0);
  }
  if (E.cell_block > 0)
    for (int t = 0; t < mesh.n_tets(); ++t) {
      interior_moments(mesh, t, E.degree, 1, grad_on_cell(t), block);
      out.segment(E.cell_offset + t * E.cell_block, E.cell_block) = block.col(0);
    }
  return out;
}

}  // namespace qc
