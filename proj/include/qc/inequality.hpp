#ifndef QC_INEQUALITY_HPP
#define QC_INEQUALITY_HPP

#include <string>

#include "qc/forms.hpp"
#include "qc/spaces.hpp"

namespace qc {

// One estimated inequality constant.  `n` is the refinement level of the mesh
// the probe ran on; the probes themselves leave it at 0 and the caller fills
// it in, since a Mesh does not remember how it was generated.
struct InequalityProbe {
  std::string inequality;
  int n = 0;
  double constant = 0.0;
  std::string method;  // "eigen" or "sampling"
  int samples = 0;
};

// Quadratic forms on the fully discontinuous space [P_degree(T_h)]^3.
// G is the broken H^1 Gram matrix (cell-wise L2 plus gradient), M the
// curl/div volume form plus h_F^{-1} full-vector jump penalties on every
// face, boundary faces single-sided.  Basis: component d times the
// orthonormal reference scalar s on each cell, local index d * ns + s,
// cells blocked consecutively.
struct BrokenForms {
  SpMat G;
  SpMat M;
  int dim = 0;
};

BrokenForms build_broken_forms(const Mesh& mesh, int degree);

// Best constant C_h in  sum_K ||v||_{1,K}^2 <= C_h^2 * M(v,v)  over the broken
// space, via the largest eigenvalue of the pencil (G, M).  Dense solve for
// small systems, M-orthogonal Lanczos beyond that.
InequalityProbe sobolev_constant(const Mesh& mesh, int degree);

// Lower bound on the same constant from random Rayleigh quotients.
InequalityProbe sobolev_sampled(const Mesh& mesh, int degree, int samples, unsigned seed);

// Max of ||v||_{0,3} / ||curl v||_0 over random fields in the curl space with
// their discrete gradient part removed (elliptic projection onto gradients of
// the pressure space).  Samples that project to numerically zero are redrawn.
InequalityProbe l3_gradient_orthogonal_probe(const Mesh& mesh, int k, int samples, unsigned seed);

// Smallest value of x^T A x / |||x|||^2 over the discretely divergence-free
// subspace {B x = 0}, from a dense null-space reduction.  Symmetric variant.
double coercivity_margin(const Mesh& mesh, int k, double tau);

}  // namespace qc

#endif
