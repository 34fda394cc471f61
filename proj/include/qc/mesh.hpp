#ifndef QC_MESH_HPP
#define QC_MESH_HPP

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qc {

/// A triangular face of the tetrahedral mesh.
///
/// Vertex indices are stored sorted ascending; this sorted triple is the
/// global orientation of the face. The unit normal points from the owner
/// tet towards the neighbor (outward on boundary faces).
struct FaceInfo {
  std::array<int, 3> vertices{};
  int owner = -1;
  int neighbor = -1;  // -1 on boundary faces
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();
  double area = 0.0;
  double diameter = 0.0;  // longest edge of the face

  bool is_boundary() const { return neighbor < 0; }
};

/// Conforming tetrahedral mesh with full face/edge topology.
///
/// Conventions:
///  - every tet has positive signed volume under its stored vertex order;
///  - global edge direction runs from the lower to the higher vertex index;
///  - faces and edges are numbered lexicographically by their sorted vertex
///    tuples, so numbering is independent of input element order;
///  - the owner of an interior face is the incident tet with smaller index.
///
/// Local entity numbering within a tet (v0,v1,v2,v3):
///  - local face l is opposite local vertex l: (1,2,3),(0,2,3),(0,1,3),(0,1,2)
///  - local edges: (0,1),(0,2),(0,3),(1,2),(1,3),(2,3)
///
/// The mesh is immutable after construction and safe for concurrent reads.
struct Mesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 4>> tets;
  std::vector<FaceInfo> faces;
  std::vector<std::array<int, 2>> edges;  // [lower, higher]

  std::vector<std::array<int, 4>> tet_to_faces;
  std::vector<std::array<int, 6>> tet_to_edges;

  std::vector<char> vertex_on_boundary;
  std::vector<char> edge_on_boundary;

  std::vector<int> edge_to_tet;  // one incident tet per edge (smallest index)

  std::vector<double> h_K;  // longest edge per tet
  double h = 0.0;           // max over h_K

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_tets() const { return static_cast<int>(tets.size()); }
  int n_faces() const { return static_cast<int>(faces.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
  int n_boundary_faces() const;
  int n_boundary_edges() const;

  bool face_on_boundary(int f) const { return faces[f].is_boundary(); }

  /// Jacobian of the affine map from the reference tet, J = [v1-v0, v2-v0, v3-v0].
  Eigen::Matrix3d jacobian(int t) const;
  double volume(int t) const;
  Eigen::Vector3d centroid(int t) const;
  /// Physical point -> reference coordinates of tet t.
  Eigen::Vector3d to_reference(int t, const Eigen::Vector3d& x) const;
  Eigen::Vector3d from_reference(int t, const Eigen::Vector3d& xhat) const;
};

struct MeshSizes {
  double h = 0.0;
  std::vector<double> h_K;
  std::vector<double> h_F;
};

/// Uniform tetrahedral mesh of the unit cube: each of the n^3 subcubes is
/// split into 6 tets around its main diagonal. Produces 6n^3 tets.
Mesh generate_cube_mesh(int n);

/// Rebuild faces, edges and adjacency from the vertex/tet lists.
/// Throws on faces shared by more than two tets ("non-manifold mesh").
void build_topology(Mesh& mesh);

MeshSizes mesh_sizes(const Mesh& mesh);

}  // namespace qc

#endif
