#ifndef QC_SPACES_HPP
#define QC_SPACES_HPP

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "qc/mesh.hpp"
#include "qc/polybasis.hpp"
#include "qc/quadrature.hpp"

namespace qc {

enum class SpaceKind { HCurl, Lagrange };

using RefPoints = Eigen::Matrix<double, Eigen::Dynamic, 3>;

/// Basis evaluation tables for one cell of a vector-valued space. Columns are
/// local basis functions; rows are grouped per point (3 rows per point for
/// values/curls, 9 rows per point for the column-major curl Jacobians).
struct VectorEval {
  Eigen::MatrixXd values;
  Eigen::MatrixXd curls;
  Eigen::MatrixXd curl_jacs;
};

/// Basis evaluation tables for one cell of a scalar space: `values` has one
/// row per point, `gradients` three rows per point.
struct ScalarEval {
  Eigen::MatrixXd values;
  Eigen::MatrixXd gradients;
};

/// Finite element space on a tetrahedral mesh, either
///  - HCurl: tangentially continuous full-polynomial vectors of degree 2 or 3
///    (second-kind Nedelec), covariantly mapped from the reference cell; or
///  - Lagrange: continuous nodal scalars of degree 3 or 4.
///
/// Degrees of freedom attach to global mesh entities. HCurl dofs are moments:
/// on each edge, tangential moments against Legendre polynomials taken along
/// the lower-to-higher-vertex direction; on each face, moments of the in-plane
/// trace against a Raviart-Thomas style test set in the face's own coordinate
/// frame (spanned by the sorted vertex triple); in each cell, moments against
/// a small interior test set (degree 3 only). Lagrange dofs are point values
/// at global node positions. Because every functional is defined purely by
/// global entity data, the two cells sharing a face or an edge see literally
/// the same functional, so no orientation flips or permutation tables are
/// needed and assembled matrices are invariant under relabeling.
///
/// Per cell, the nodal basis is obtained by inverting the generalized
/// Vandermonde matrix of the dof functionals applied to a mapped orthonormal
/// prime basis. Homogeneous essential boundary conditions are imposed by
/// constraining every dof attached to a boundary entity; `free_index` maps
/// dof ids to indices in the reduced (free) numbering.
struct FESpace {
  SpaceKind kind = SpaceKind::HCurl;
  int degree = 0;
  const Mesh* mesh = nullptr;

  // Dof counts per entity and offsets of the face/cell blocks within the
  // global numbering (edge dofs come first, then face dofs, then cell dofs).
  int edge_block = 0;
  int face_block = 0;
  int cell_block = 0;
  int face_offset = 0;
  int cell_offset = 0;

  int n_dofs = 0;
  int n_free = 0;
  std::vector<char> dof_on_boundary;
  std::vector<int> free_index;  // dof id -> free index, -1 if constrained
  std::vector<int> free_dofs;   // free index -> dof id

  std::vector<std::vector<int>> cell_dofs;  // global dof ids per cell, local order
  std::vector<Eigen::MatrixXd> cell_coeff;  // prime-to-nodal coefficient matrix per cell

  std::shared_ptr<ScalarPolyBasis> scalar;
  Eigen::Matrix<double, Eigen::Dynamic, 3> nodes;  // Lagrange node positions

  int dofs_per_cell() const { return static_cast<int>(cell_dofs.empty() ? 0 : cell_dofs[0].size()); }

  void eval_vector(int t, const RefPoints& ref_pts, VectorEval& out) const;
  void eval_vector_values(int t, const RefPoints& ref_pts, Eigen::MatrixXd& values) const;
  void eval_scalar(int t, const RefPoints& ref_pts, ScalarEval& out) const;

  /// Element-local slice of a full-length coefficient vector.
  Eigen::VectorXd gather(int t, const Eigen::VectorXd& full) const;
};

FESpace build_hcurl_space(const Mesh& mesh, int degree);
FESpace build_lagrange_space(const Mesh& mesh, int degree);

/// Curl of a vector field from the Jacobian of that field.
inline Eigen::Vector3d curl_from_jacobian(const Eigen::Matrix3d& G) {
  return {G(2, 1) - G(1, 2), G(0, 2) - G(2, 0), G(1, 0) - G(0, 1)};
}

Eigen::VectorXd expand_free(const FESpace& space, const Eigen::VectorXd& free_vec);
Eigen::VectorXd restrict_free(const FESpace& space, const Eigen::VectorXd& full_vec);

/// Apply the dof functionals to an analytic field; returns full-length
/// coefficients whose finite element function interpolates the field.
Eigen::VectorXd interpolate(const FESpace& space,
                            const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& field);
Eigen::VectorXd interpolate(const FESpace& space,
                            const std::function<double(const Eigen::Vector3d&)>& field);

/// Coefficients in the HCurl space E representing the gradient of the scalar
/// finite element function with full-length coefficients `q_full` in Q.
/// Piecewise gradients are evaluated on a fixed incident cell per entity;
/// the components the functionals see are continuous, so the choice of cell
/// only shifts roundoff.
Eigen::VectorXd gradient_representation(const FESpace& E, const FESpace& Q,
                                        const Eigen::VectorXd& q_full);

}  // namespace qc

#endif
