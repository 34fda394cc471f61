#include "qc/errors.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <Eigen/SparseCholesky>

namespace qc {

namespace {

void check_p(double p) {
  if (p != 1.5 && p != 2.0 && p != 3.0 && p != 6.0)
    throw std::runtime_error("lp_norm: unsupported exponent");
}

Eigen::Matrix3d jac_at(const Eigen::MatrixXd& curl_jacs, const Eigen::VectorXd& loc, int q) {
  const Eigen::VectorXd col = curl_jacs.middleRows(9 * q, 9) * loc;
  return Eigen::Map<const Eigen::Matrix3d>(col.data());
}

}  // namespace

ErrorReport compute_errors(const FESpace& E, const FESpace& Q, const Eigen::VectorXd& u_full,
                           const Eigen::VectorXd& p_full, const ManufacturedCase& mc,
                           const SchemeParams& prm) {
  if (E.mesh != Q.mesh) throw std::runtime_error("compute_errors: spaces on different meshes");
  const Mesh& mesh = *E.mesh;

  ErrorReport rep;
  rep.h = mesh.h;
  rep.dofs_u = E.n_free;
  rep.dofs_p = Q.n_free;

  double l2_u = 0, l2_curl = 0, cc_sq = 0, jac_sq = 0, grad_p = 0, l2_p = 0;
  double l3 = 0, l6 = 0, jac_uh_sq = 0, l32 = 0;
  double en_jump = 0, h1_jump = 0, h1_jump_uh = 0;

  const QuadRule& vrule = tet_rule(3 * E.degree + 3);
  VectorEval ev;
  ScalarEval se;
  for (int t = 0; t < mesh.n_tets(); ++t) {
    E.eval_vector(t, vrule.points, ev);
    Q.eval_scalar(t, vrule.points, se);
    const Eigen::VectorXd lu = E.gather(t, u_full);
    const Eigen::VectorXd lp = Q.gather(t, p_full);
    const double detJ = 6.0 * mesh.volume(t);

    for (int q = 0; q < vrule.size(); ++q) {
      const double w = vrule.weights[q] * detJ;
      const Eigen::Vector3d x = mesh.from_reference(t, vrule.points.row(q).transpose());

      const Eigen::Vector3d uh = ev.values.middleRows(3 * q, 3) * lu;
      const Eigen::Vector3d ch = ev.curls.middleRows(3 * q, 3) * lu;
      const Eigen::Matrix3d Jh = jac_at(ev.curl_jacs, lu, q);
      const Eigen::Vector3d cch = curl_from_jacobian(Jh);
      const double ph = se.values.row(q) * lp;
      const Eigen::Vector3d gph = se.gradients.middleRows(3 * q, 3) * lp;

      l2_u += w * (mc.u(x) - uh).squaredNorm();
      l2_curl += w * (mc.curl_u(x) - ch).squaredNorm();
      cc_sq += w * (mc.curl2_u(x) - cch).squaredNorm();
      jac_sq += w * (mc.curl_u_jacobian(x) - Jh).squaredNorm();
      grad_p += w * (mc.grad_p(x) - gph).squaredNorm();
      l2_p += w * (mc.p(x) - ph) * (mc.p(x) - ph);

      l3 += w * std::pow(uh.norm(), 3.0);
      l6 += w * std::pow(ch.squaredNorm(), 3.0);
      jac_uh_sq += w * Jh.squaredNorm();
      l32 += w * std::pow(mc.f(x).norm(), 1.5);
    }
  }

  const QuadRule& frule = triangle_rule(3 * E.degree + 2 > 14 ? 14 : 3 * E.degree + 2);
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const FaceInfo& face = mesh.faces[f];
    const Eigen::Vector3d a = mesh.vertices[face.vertices[0]];
    const Eigen::Vector3d t1 = mesh.vertices[face.vertices[1]] - a;
    const Eigen::Vector3d t2 = mesh.vertices[face.vertices[2]] - a;
    const double measure = t1.cross(t2).norm();

    std::vector<int> cells = {face.owner};
    if (!face.is_boundary()) cells.push_back(face.neighbor);
    std::vector<Eigen::VectorXd> curls(cells.size());
    for (size_t s = 0; s < cells.size(); ++s) {
      RefPoints ref(frule.size(), 3);
      for (int q = 0; q < frule.size(); ++q) {
        const Eigen::Vector3d x = a + frule.points(q, 0) * t1 + frule.points(q, 1) * t2;
        ref.row(q) = mesh.to_reference(cells[s], x).transpose();
      }
      E.eval_vector(cells[s], ref, ev);
      curls[s] = ev.curls * E.gather(cells[s], u_full);
    }

    for (int q = 0; q < frule.size(); ++q) {
      const double w = frule.weights[q] * measure;
      Eigen::Vector3d jump_uh = curls[0].segment<3>(3 * q);
      if (cells.size() == 2) jump_uh -= curls[1].segment<3>(3 * q);

      // Error jump: the exact curl is single-valued, so it cancels on
      // interior faces and only enters through the boundary trace.
      Eigen::Vector3d jump_e = -jump_uh;
      if (cells.size() == 1) {
        const Eigen::Vector3d x = a + frule.points(q, 0) * t1 + frule.points(q, 1) * t2;
        jump_e += mc.curl_u(x);
      }

      en_jump += (prm.tau / face.diameter) * w * face.normal.cross(jump_e).squaredNorm();
      h1_jump += (1.0 / face.diameter) * w * jump_e.squaredNorm();
      h1_jump_uh += (1.0 / face.diameter) * w * jump_uh.squaredNorm();
    }
  }

  rep.e_l2_u = std::sqrt(l2_u);
  rep.e_l2_curl = std::sqrt(l2_curl);
  rep.e_energy = std::sqrt(cc_sq + en_jump);
  rep.e_h1h_curl = std::sqrt(jac_sq + h1_jump);
  rep.e_grad_p = std::sqrt(grad_p);
  rep.e_l2_p = std::sqrt(l2_p);
  rep.l3_u = std::pow(l3, 1.0 / 3.0);
  rep.l6_curl = std::pow(l6, 1.0 / 6.0);
  rep.h1h_curl_uh = std::sqrt(jac_uh_sq + h1_jump_uh);
  rep.l32_f = std::pow(l32, 2.0 / 3.0);
  return rep;
}

namespace {

Eigen::VectorXd mass_solve(const FESpace& space, const Eigen::VectorXd& rhs, bool constrained) {
  const SpMat M_full = assemble_mass(space);
  if (!constrained) {
    Eigen::SimplicialLDLT<SpMat> chol(M_full);
    if (chol.info() != Eigen::Success)
      throw std::runtime_error("project_l2: mass matrix factorization failed");
    return chol.solve(rhs);
  }
  // Restrict to the free dofs, solve, and expand with zero boundary values.
  std::vector<Eigen::Triplet<double>> trips;
  for (int kcol = 0; kcol < M_full.outerSize(); ++kcol)
    for (SpMat::InnerIterator it(M_full, kcol); it; ++it) {
      const int ri = space.free_index[it.row()];
      const int ci = space.free_index[it.col()];
      if (ri >= 0 && ci >= 0) trips.emplace_back(ri, ci, it.value());
    }
  SpMat M(space.n_free, space.n_free);
  M.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<SpMat> chol(M);
  if (chol.info() != Eigen::Success)
    throw std::runtime_error("project_l2: mass matrix factorization failed");
  return expand_free(space, chol.solve(restrict_free(space, rhs)));
}

}  // namespace

Eigen::VectorXd project_l2(const FESpace& space, const VectorField& field, bool constrained) {
  if (space.kind != SpaceKind::HCurl)
    throw std::runtime_error("project_l2: vector field requires an HCurl space");
  const Mesh& mesh = *space.mesh;
  const QuadRule& rule = tet_rule(3 * space.degree + 3);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.n_dofs);
  Eigen::MatrixXd VV;
  for (int t = 0; t < mesh.n_tets(); ++t) {
    space.eval_vector_values(t, rule.points, VV);
    const double detJ = 6.0 * mesh.volume(t);
    Eigen::VectorXd loc = Eigen::VectorXd::Zero(space.dofs_per_cell());
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d x = mesh.from_reference(t, rule.points.row(q).transpose());
      loc.noalias() += (rule.weights[q] * detJ) * VV.middleRows(3 * q, 3).transpose() * field(x);
    }
    const auto& dofs = space.cell_dofs[t];
    for (size_t i = 0; i < dofs.size(); ++i) rhs[dofs[i]] += loc[i];
  }
  return mass_solve(space, rhs, constrained);
}

Eigen::VectorXd project_l2(const FESpace& space, const ScalarField& field, bool constrained) {
  if (space.kind != SpaceKind::Lagrange)
    throw std::runtime_error("project_l2: scalar field requires a Lagrange space");
  const Mesh& mesh = *space.mesh;
  const QuadRule& rule = tet_rule(3 * space.degree + 2 > 14 ? 14 : 3 * space.degree + 2);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.n_dofs);
  ScalarEval se;
  for (int t = 0; t < mesh.n_tets(); ++t) {
    space.eval_scalar(t, rule.points, se);
    const double detJ = 6.0 * mesh.volume(t);
    Eigen::VectorXd loc = Eigen::VectorXd::Zero(space.dofs_per_cell());
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d x = mesh.from_reference(t, rule.points.row(q).transpose());
      loc.noalias() += (rule.weights[q] * detJ) * field(x) * se.values.row(q).transpose();
    }
    const auto& dofs = space.cell_dofs[t];
    for (size_t i = 0; i < dofs.size(); ++i) rhs[dofs[i]] += loc[i];
  }
  return mass_solve(space, rhs, constrained);
}

std::vector<double> eoc(const std::vector<double>& h, const std::vector<double>& e) {
  if (h.size() != e.size() || h.size() < 2)
    throw std::runtime_error("eoc: need matching h and error sequences with at least 2 levels");
  std::vector<double> orders;
  for (size_t i = 1; i < h.size(); ++i) {
    if (std::abs(h[i - 1] / h[i] - 2.0) > 1e-9)
      throw std::runtime_error("eoc: mesh sizes must halve between levels");
    orders.push_back(std::log2(e[i - 1] / e[i]));
  }
  return orders;
}

double lp_norm(const FESpace& E, const Eigen::VectorXd& full, double p) {
  check_p(p);
  if (E.kind != SpaceKind::HCurl) throw std::runtime_error("lp_norm: expects an HCurl space");
  const Mesh& mesh = *E.mesh;
  const QuadRule& rule = tet_rule(3 * E.degree + 3);
  double acc = 0.0;
  Eigen::MatrixXd VV;
  for (int t = 0; t < mesh.n_tets(); ++t) {
    E.eval_vector_values(t, rule.points, VV);
    const Eigen::VectorXd vals = VV * E.gather(t, full);
    const double detJ = 6.0 * mesh.volume(t);
    for (int q = 0; q < rule.size(); ++q)
      acc += rule.weights[q] * detJ * std::pow(vals.segment<3>(3 * q).norm(), p);
  }
  return std::pow(acc, 1.0 / p);
}

double lp_norm(const Mesh& mesh, const VectorField& field, double p, int quad_degree) {
  check_p(p);
  const QuadRule& rule = tet_rule(quad_degree);
  double acc = 0.0;
  for (int t = 0; t < mesh.n_tets(); ++t) {
    const double detJ = 6.0 * mesh.volume(t);
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d x = mesh.from_reference(t, rule.points.row(q).transpose());
      acc += rule.weights[q] * detJ * std::pow(field(x).norm(), p);
    }
  }
  return std::pow(acc, 1.0 / p);
}

std::string eoc_table_csv(const std::vector<ErrorReport>& rows) {
  std::ostringstream out;
  out << "n,h,dofs_u,dofs_p,e_l2_u,order_l2_u,e_l2_curl,order_l2_curl,"
         "e_energy,order_energy,e_h1h_curl,order_h1h_curl,e_grad_p,order_grad_p,"
         "e_l2_p,order_l2_p,l3_u,l6_curl,h1h_curl_uh,l32_f,"
         "ratio_l3_u,ratio_l6_curl,ratio_h1h_curl\n";
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
  };
  for (size_t i = 0; i < rows.size(); ++i) {
    const ErrorReport& r = rows[i];
    auto order = [&](double ec, double ef) -> std::string {
      if (i == 0) return "";
      return num(std::log2(ec / ef));
    };
    const ErrorReport* prev = i > 0 ? &rows[i - 1] : nullptr;
    out << r.n << "," << num(r.h) << "," << r.dofs_u << "," << r.dofs_p << ","
        << num(r.e_l2_u) << "," << (prev ? order(prev->e_l2_u, r.e_l2_u) : "") << ","
        << num(r.e_l2_curl) << "," << (prev ? order(prev->e_l2_curl, r.e_l2_curl) : "") << ","
        << num(r.e_energy) << "," << (prev ? order(prev->e_energy, r.e_energy) : "") << ","
        << num(r.e_h1h_curl) << "," << (prev ? order(prev->e_h1h_curl, r.e_h1h_curl) : "") << ","
        << num(r.e_grad_p) << "," << (prev ? order(prev->e_grad_p, r.e_grad_p) : "") << ","
        << num(r.e_l2_p) << "," << (prev ? order(prev->e_l2_p, r.e_l2_p) : "") << ","
        << num(r.l3_u) << "," << num(r.l6_curl) << "," << num(r.h1h_curl_uh) << ","
        << num(r.l32_f) << "," << num(r.l3_u / r.l32_f) << "," << num(r.l6_curl / r.l32_f)
        << "," << num(r.h1h_curl_uh / r.l32_f) << "\n";
  }
  return out.str();
}

}  // namespace qc
