#ifndef QC_QUADRATURE_HPP
#define QC_QUADRATURE_HPP

#include <vector>

#include <Eigen/Dense>

namespace qc {

/// Quadrature rule on a reference simplex. Points are barycentric-free
/// reference coordinates: the unit triangle {x,y >= 0, x+y <= 1} for dim 2,
/// the unit tetrahedron for dim 3. Weights sum to the reference measure.
struct QuadRule {
  int dim = 0;
  int degree = 0;  // every polynomial up to this total degree is integrated exactly
  Eigen::Matrix<double, Eigen::Dynamic, 3> points;  // column 2 unused for dim 2
  Eigen::VectorXd weights;

  int size() const { return static_cast<int>(weights.size()); }
};

/// Gauss-Legendre rule with m points on [0,1], exact through degree 2m-1.
void gauss_legendre(int m, Eigen::VectorXd& points, Eigen::VectorXd& weights);

/// Conical-product rule on the unit triangle, exact through `degree` (0..14).
const QuadRule& triangle_rule(int degree);

/// Conical-product rule on the unit tetrahedron, exact through `degree` (0..14).
const QuadRule& tet_rule(int degree);

}  // namespace qc

#endif
