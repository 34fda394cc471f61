#ifndef QC_MANUFACTURED_HPP
#define QC_MANUFACTURED_HPP

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qc {

using ScalarField = std::function<double(const Eigen::Vector3d&)>;
using VectorField = std::function<Eigen::Vector3d(const Eigen::Vector3d&)>;
using MatrixField = std::function<Eigen::Matrix3d(const Eigen::Vector3d&)>;

/// Closed-form exact solution of the quad-curl boundary value problem
///   curl^4 u + grad p = f,  div u = 0  in (0,1)^3,
///   n x u = 0,  n x curl u = 0,  p = 0  on the boundary,
/// together with every derived field the error measures need.
struct ManufacturedCase {
  std::string name;
  VectorField u;
  VectorField curl_u;
  MatrixField curl_u_jacobian;
  VectorField curl2_u;
  VectorField curl3_u;
  VectorField curl4_u;
  ScalarField p;
  VectorField grad_p;
  VectorField f;
};

/// Divergence-free velocity with a nonzero pressure:
///   u = (g(x) g'(y) g(z), -g'(x) g(y) g(z), 0) with g(t) = sin^3(pi t),
///   p = sin(pi x) sin(pi y) sin(pi z).
/// The sin^3 profile is the lowest power of sin for which g, g' and g''
/// all vanish at 0 and 1, which is exactly what the essential conditions
/// n x u = 0 and n x curl u = 0 require on every face of the cube.
ManufacturedCase case_a();

/// Same velocity with p = 0; the load curl^4 u is itself divergence free,
/// so the exact Lagrange multiplier of the mixed system vanishes.
ManufacturedCase case_b();

struct FdCheckEntry {
  std::string name;
  double max_abs_error = 0.0;
  double scale = 0.0;       // max magnitude of the reference quantity seen
  double rel_error = 0.0;   // max_abs_error / max(1, scale)
};

struct FdCheckReport {
  std::vector<FdCheckEntry> entries;
  double max_rel_error = 0.0;
};

/// Validate the closed forms against fourth-order central differences at
/// `n_samples` random interior points. Each differential identity is checked
/// one link at a time (u -> curl u -> ... -> f), so a transcription error in
/// any closed form shows up directly.
FdCheckReport fd_check(const ManufacturedCase& mc, int n_samples = 200, unsigned seed = 42,
                       double step = 1e-2);

}  // namespace qc

#endif
