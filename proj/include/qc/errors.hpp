#ifndef QC_ERRORS_HPP
#define QC_ERRORS_HPP

#include <string>
#include <vector>

#include "qc/forms.hpp"
#include "qc/manufactured.hpp"
#include "qc/spaces.hpp"

namespace qc {

/// Error norms of one discrete solution against the exact fields, plus the
/// solution norms the stability estimates bound. `e_energy` collects the
/// broken curl-curl terms and the tau-weighted tangential jumps; `e_h1h_curl`
/// is the broken H1 norm of the curl error with unweighted full jumps. The
/// L^p entries (p not an even integer) are quadrature approximations.
struct ErrorReport {
  int n = 0;
  double h = 0.0;
  int dofs_u = 0;
  int dofs_p = 0;

  double e_l2_u = 0.0;
  double e_l2_curl = 0.0;
  double e_energy = 0.0;
  double e_h1h_curl = 0.0;
  double e_grad_p = 0.0;
  double e_l2_p = 0.0;

  double l3_u = 0.0;        // ||u_h||_{0,3}
  double l6_curl = 0.0;     // ||curl u_h||_{0,6}
  double h1h_curl_uh = 0.0; // broken H1 norm of curl u_h, with jumps
  double l32_f = 0.0;       // ||f||_{0,3/2}
  bool lp_approximate = true;
};

ErrorReport compute_errors(const FESpace& E, const FESpace& Q, const Eigen::VectorXd& u_full,
                           const Eigen::VectorXd& p_full, const ManufacturedCase& mc,
                           const SchemeParams& prm);

/// L2 projection of a field onto the space; set `constrained` to project onto
/// the subspace with homogeneous essential conditions. Returns full-length
/// coefficients.
Eigen::VectorXd project_l2(const FESpace& space, const VectorField& field,
                           bool constrained = false);
Eigen::VectorXd project_l2(const FESpace& space, const ScalarField& field,
                           bool constrained = false);

/// Observed convergence orders log2(e_coarse / e_fine) for a sequence of
/// errors on meshes with halving h. Throws if h does not halve.
std::vector<double> eoc(const std::vector<double>& h, const std::vector<double>& e);

/// L^p norm of a vector finite element function or an analytic field over the
/// mesh, p in {3/2, 2, 3, 6}.
double lp_norm(const FESpace& E, const Eigen::VectorXd& full, double p);
double lp_norm(const Mesh& mesh, const VectorField& field, double p, int quad_degree = 12);

/// CSV table: one row per refinement level with every norm followed by its
/// observed order, then the stability monitors and their ratios against
/// ||f||_{0,3/2}. Column order is fixed and documented in the README.
std::string eoc_table_csv(const std::vector<ErrorReport>& rows);

}  // namespace qc

#endif
