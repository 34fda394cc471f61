#include "qc/mesh.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace qc {

int Mesh::n_boundary_faces() const {
  int count = 0;
  for (const auto& f : faces)
    if (f.is_boundary()) ++count;
  return count;
}

int Mesh::n_boundary_edges() const {
  int count = 0;
  for (char b : edge_on_boundary)
    if (b) ++count;
  return count;
}

Eigen::Matrix3d Mesh::jacobian(int t) const {
  const auto& tet = tets[t];
  Eigen::Matrix3d J;
  for (int c = 0; c < 3; ++c) J.col(c) = vertices[tet[c + 1]] - vertices[tet[0]];
  return J;
}

double Mesh::volume(int t) const { return jacobian(t).determinant() / 6.0; }

Eigen::Vector3d Mesh::centroid(int t) const {
  const auto& tet = tets[t];
  return 0.25 * (vertices[tet[0]] + vertices[tet[1]] + vertices[tet[2]] + vertices[tet[3]]);
}

Eigen::Vector3d Mesh::to_reference(int t, const Eigen::Vector3d& x) const {
  return jacobian(t).partialPivLu().solve(x - vertices[tets[t][0]]);
}

Eigen::Vector3d Mesh::from_reference(int t, const Eigen::Vector3d& xhat) const {
  return vertices[tets[t][0]] + jacobian(t) * xhat;
}

namespace {

constexpr int kLocalFaces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
constexpr int kLocalEdges[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

double face_diameter(const Mesh& mesh, const std::array<int, 3>& v) {
  double d = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      d = std::max(d, (mesh.vertices[v[a]] - mesh.vertices[v[b]]).norm());
  return d;
}

}  // namespace

Mesh generate_cube_mesh(int n) {
  if (n < 1) throw std::runtime_error("generate_cube_mesh: n must be >= 1");

  Mesh mesh;
  const int m = n + 1;
  mesh.vertices.reserve(static_cast<size_t>(m) * m * m);
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i)
        mesh.vertices.emplace_back(double(i) / n, double(j) / n, double(k) / n);

  auto vid = [m](int i, int j, int k) { return i + m * (j + m * k); };

  // Six permutations of the axes; each gives one tet of the subcube running
  // along the main diagonal c0 -> c0 + (1,1,1).
  constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                               {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  constexpr int perm_sign[6] = {1, -1, -1, 1, 1, -1};

  mesh.tets.reserve(static_cast<size_t>(6) * n * n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (int p = 0; p < 6; ++p) {
          int step[3] = {i, j, k};
          std::array<int, 4> tet;
          tet[0] = vid(step[0], step[1], step[2]);
          for (int s = 0; s < 3; ++s) {
            step[perms[p][s]] += 1;
            tet[s + 1] = vid(step[0], step[1], step[2]);
          }
          // An odd axis permutation yields a negatively oriented tet; swapping
          // the two middle vertices restores positive volume.
          if (perm_sign[p] < 0) std::swap(tet[1], tet[2]);
          mesh.tets.push_back(tet);
        }

  build_topology(mesh);
  return mesh;
}

void build_topology(Mesh& mesh) {
  const int nt = mesh.n_tets();
  const int nv = mesh.n_vertices();

  for (int t = 0; t < nt; ++t) {
    for (int v : mesh.tets[t])
      if (v < 0 || v >= nv) throw std::runtime_error("build_topology: vertex index out of range");
    if (mesh.jacobian(t).determinant() <= 0.0)
      throw std::runtime_error("build_topology: tet " + std::to_string(t) +
                               " is degenerate or negatively oriented");
  }

  // Collect faces and edges keyed by their sorted vertex tuples. std::map
  // gives the lexicographic numbering directly.
  std::map<std::array<int, 3>, std::vector<int>> face_tets;
  std::map<std::array<int, 2>, int> edge_ids;
  for (int t = 0; t < nt; ++t) {
    const auto& tet = mesh.tets[t];
    for (const auto& lf : kLocalFaces) {
      std::array<int, 3> key = {tet[lf[0]], tet[lf[1]], tet[lf[2]]};
      std::sort(key.begin(), key.end());
      face_tets[key].push_back(t);
    }
    for (const auto& le : kLocalEdges) {
      std::array<int, 2> key = {tet[le[0]], tet[le[1]]};
      if (key[0] > key[1]) std::swap(key[0], key[1]);
      edge_ids.emplace(key, 0);
    }
  }

  mesh.faces.clear();
  mesh.faces.reserve(face_tets.size());
  std::map<std::array<int, 3>, int> face_index;
  for (auto& [key, tets] : face_tets) {
    if (tets.size() > 2)
      throw std::runtime_error("build_topology: non-manifold mesh (face shared by " +
                               std::to_string(tets.size()) + " tets)");
    FaceInfo f;
    f.vertices = key;
    std::sort(tets.begin(), tets.end());
    f.owner = tets[0];
    f.neighbor = tets.size() == 2 ? tets[1] : -1;

    const Eigen::Vector3d a = mesh.vertices[key[0]];
    const Eigen::Vector3d b = mesh.vertices[key[1]];
    const Eigen::Vector3d c = mesh.vertices[key[2]];
    Eigen::Vector3d nrm = (b - a).cross(c - a);
    f.area = 0.5 * nrm.norm();
    if (f.area <= 0.0) throw std::runtime_error("build_topology: degenerate face");
    nrm.normalize();
    // Orient from owner towards neighbor (outward on the boundary).
    const Eigen::Vector3d face_centroid = (a + b + c) / 3.0;
    if (nrm.dot(face_centroid - mesh.centroid(f.owner)) < 0.0) nrm = -nrm;
    f.normal = nrm;
    f.diameter = face_diameter(mesh, key);

    face_index.emplace(key, static_cast<int>(mesh.faces.size()));
    mesh.faces.push_back(f);
  }

  mesh.edges.clear();
  mesh.edges.reserve(edge_ids.size());
  for (auto& [key, id] : edge_ids) {
    id = static_cast<int>(mesh.edges.size());
    mesh.edges.push_back(key);
  }

  mesh.tet_to_faces.assign(nt, {});
  mesh.tet_to_edges.assign(nt, {});
  mesh.edge_to_tet.assign(mesh.n_edges(), -1);
  for (int t = 0; t < nt; ++t) {
    const auto& tet = mesh.tets[t];
    for (int l = 0; l < 4; ++l) {
      std::array<int, 3> key = {tet[kLocalFaces[l][0]], tet[kLocalFaces[l][1]],
                                tet[kLocalFaces[l][2]]};
      std::sort(key.begin(), key.end());
      mesh.tet_to_faces[t][l] = face_index.at(key);
    }
    for (int l = 0; l < 6; ++l) {
      std::array<int, 2> key = {tet[kLocalEdges[l][0]], tet[kLocalEdges[l][1]]};
      if (key[0] > key[1]) std::swap(key[0], key[1]);
      const int e = edge_ids.at(key);
      mesh.tet_to_edges[t][l] = e;
      if (mesh.edge_to_tet[e] < 0) mesh.edge_to_tet[e] = t;
    }
  }

  // Boundary flags propagate from boundary faces to their edges and vertices.
  mesh.vertex_on_boundary.assign(nv, 0);
  mesh.edge_on_boundary.assign(mesh.n_edges(), 0);
  for (const auto& f : mesh.faces) {
    if (!f.is_boundary()) continue;
    for (int v : f.vertices) mesh.vertex_on_boundary[v] = 1;
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) {
        std::array<int, 2> key = {f.vertices[a], f.vertices[b]};
        mesh.edge_on_boundary[edge_ids.at(key)] = 1;
      }
  }

  mesh.h_K.assign(nt, 0.0);
  mesh.h = 0.0;
  for (int t = 0; t < nt; ++t) {
    double hk = 0.0;
    for (const auto& le : kLocalEdges) {
      const double len =
          (mesh.vertices[mesh.tets[t][le[0]]] - mesh.vertices[mesh.tets[t][le[1]]]).norm();
      hk = std::max(hk, len);
    }
    mesh.h_K[t] = hk;
    mesh.h = std::max(mesh.h, hk);
  }
}

MeshSizes mesh_sizes(const Mesh& mesh) {
  MeshSizes s;
  s.h = mesh.h;
  s.h_K = mesh.h_K;
  s.h_F.reserve(mesh.faces.size());
  for (const auto& f : mesh.faces) s.h_F.push_back(f.diameter);
  return s;
}

}  // namespace qc
