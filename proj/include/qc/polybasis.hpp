#ifndef QC_POLYBASIS_HPP
#define QC_POLYBASIS_HPP

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace qc {

/// L2-orthonormal basis of P_d on the reference tetrahedron, built by a
/// Cholesky orthonormalization of the monomials. The exact monomial Gram
/// matrix comes from the closed-form integral
///   int_That x^a y^b z^c = a! b! c! / (a+b+c+3)!
/// so no quadrature enters the construction. Well conditioned for the
/// moderate degrees used here (d <= 6).
class ScalarPolyBasis {
 public:
  explicit ScalarPolyBasis(int degree);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(exponents_.size()); }

  /// Values of all basis functions at one reference point.
  void eval(const Eigen::Vector3d& xhat, Eigen::VectorXd& values) const;
  /// Values and gradients; `gradients` is size() x 3.
  void eval(const Eigen::Vector3d& xhat, Eigen::VectorXd& values,
            Eigen::MatrixXd& gradients) const;
  /// Values, gradients and Hessians (one 3x3 per function).
  void eval(const Eigen::Vector3d& xhat, Eigen::VectorXd& values, Eigen::MatrixXd& gradients,
            std::vector<Eigen::Matrix3d>& hessians) const;

 private:
  void monomials(const Eigen::Vector3d& xhat, Eigen::VectorXd& m, Eigen::MatrixXd* dm,
                 std::vector<Eigen::Matrix3d>* ddm) const;

  int degree_;
  std::vector<std::array<int, 3>> exponents_;
  Eigen::MatrixXd coeff_;  // coeff_(i,j): weight of monomial j in basis function i
};

}  // namespace qc

#endif
