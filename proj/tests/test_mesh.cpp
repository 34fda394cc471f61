#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"

#include "qc/mesh.hpp"
#include "qc/mesh_io.hpp"

using namespace qc;

namespace {

// Closed-form entity counts for the 6-tets-per-subcube split of the unit
// cube: axis edges, one face diagonal per square, one body diagonal per
// subcube.
struct Counts {
  int vertices, tets, faces, edges, boundary_faces, boundary_edges;
};

Counts expected_counts(int n) {
  Counts c;
  c.vertices = (n + 1) * (n + 1) * (n + 1);
  c.tets = 6 * n * n * n;
  c.faces = 12 * n * n * n + 6 * n * n;
  c.edges = 3 * n * (n + 1) * (n + 1) + 3 * n * n * (n + 1) + n * n * n;
  c.boundary_faces = 12 * n * n;
  c.boundary_edges = 18 * n * n;
  return c;
}

bool on_cube_surface(const Eigen::Vector3d& x) {
  for (int d = 0; d < 3; ++d)
    if (std::abs(x[d]) < 1e-12 || std::abs(x[d] - 1.0) < 1e-12) return true;
  return false;
}

}  // namespace

TEST_CASE("generated cube mesh entity counts") {
  for (int n : {1, 2, 3}) {
    CAPTURE(n);
    const Mesh mesh = generate_cube_mesh(n);
    const Counts c = expected_counts(n);
    CHECK(mesh.n_vertices() == c.vertices);
    CHECK(mesh.n_tets() == c.tets);
    CHECK(mesh.n_faces() == c.faces);
    CHECK(mesh.n_edges() == c.edges);
    CHECK(mesh.n_boundary_faces() == c.boundary_faces);
    CHECK(mesh.n_boundary_edges() == c.boundary_edges);
  }
  CHECK_THROWS_AS(generate_cube_mesh(0), std::runtime_error);
}

TEST_CASE("tet volumes are uniform and fill the cube") {
  for (int n : {1, 3}) {
    CAPTURE(n);
    const Mesh mesh = generate_cube_mesh(n);
    const double expected = 1.0 / (6.0 * n * n * n);
    double total = 0.0;
    for (int t = 0; t < mesh.n_tets(); ++t) {
      CHECK(mesh.volume(t) == doctest::Approx(expected).epsilon(1e-12));
      total += mesh.volume(t);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("face normals are unit, owner-to-neighbor, and outward on the boundary") {
  const Mesh mesh = generate_cube_mesh(2);
  for (const FaceInfo& f : mesh.faces) {
    CHECK(f.normal.norm() == doctest::Approx(1.0).epsilon(1e-13));
    const Eigen::Vector3d fc = (mesh.vertices[f.vertices[0]] + mesh.vertices[f.vertices[1]] +
                                mesh.vertices[f.vertices[2]]) /
                               3.0;
    if (f.is_boundary()) {
      // Outward from the cube: pointing away from the owner centroid, and on
      // the surface that means away from the cube center too.
      CHECK(f.normal.dot(fc - mesh.centroid(f.owner)) > 0.0);
      CHECK(f.normal.dot(fc - Eigen::Vector3d(0.5, 0.5, 0.5)) > 0.0);
    } else {
      CHECK(f.owner < f.neighbor);
      CHECK(f.normal.dot(mesh.centroid(f.neighbor) - mesh.centroid(f.owner)) > 0.0);
    }
  }
}

TEST_CASE("incidence tables match a brute-force rebuild") {
  const Mesh mesh = generate_cube_mesh(2);

  std::map<std::array<int, 3>, std::vector<int>> face_tets;
  std::set<std::array<int, 2>> edge_set;
  for (int t = 0; t < mesh.n_tets(); ++t) {
    const auto& tet = mesh.tets[t];
    for (int l = 0; l < 4; ++l) {
      std::array<int, 3> key{};
      int m = 0;
      for (int v = 0; v < 4; ++v)
        if (v != l) key[m++] = tet[v];
      std::sort(key.begin(), key.end());
      face_tets[key].push_back(t);

      // The table entry for local face l must hold exactly these vertices.
      const FaceInfo& f = mesh.faces[mesh.tet_to_faces[t][l]];
      CHECK(f.vertices == key);
    }
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        edge_set.insert({std::min(tet[a], tet[b]), std::max(tet[a], tet[b])});
  }
  CHECK(static_cast<int>(face_tets.size()) == mesh.n_faces());
  CHECK(static_cast<int>(edge_set.size()) == mesh.n_edges());

  for (const FaceInfo& f : mesh.faces) {
    const auto& inc = face_tets.at(f.vertices);
    if (f.is_boundary()) {
      REQUIRE(inc.size() == 1);
      CHECK(f.owner == inc[0]);
    } else {
      REQUIRE(inc.size() == 2);
      CHECK(f.owner == std::min(inc[0], inc[1]));
      CHECK(f.neighbor == std::max(inc[0], inc[1]));
    }
  }

  for (int e = 0; e < mesh.n_edges(); ++e) {
    CHECK(mesh.edges[e][0] < mesh.edges[e][1]);
    const int t = mesh.edge_to_tet[e];
    const auto& tet = mesh.tets[t];
    for (int v : mesh.edges[e]) CHECK(std::count(tet.begin(), tet.end(), v) == 1);
  }

  for (int t = 0; t < mesh.n_tets(); ++t) {
    const auto& tet = mesh.tets[t];
    const int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    for (int l = 0; l < 6; ++l) {
      const std::array<int, 2> key = {std::min(tet[pairs[l][0]], tet[pairs[l][1]]),
                                      std::max(tet[pairs[l][0]], tet[pairs[l][1]])};
      CHECK(mesh.edges[mesh.tet_to_edges[t][l]] == key);
    }
  }
}

TEST_CASE("boundary flags agree with cube-surface geometry") {
  const Mesh mesh = generate_cube_mesh(2);
  for (int v = 0; v < mesh.n_vertices(); ++v)
    CHECK(static_cast<bool>(mesh.vertex_on_boundary[v]) == on_cube_surface(mesh.vertices[v]));
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Eigen::Vector3d mid =
        0.5 * (mesh.vertices[mesh.edges[e][0]] + mesh.vertices[mesh.edges[e][1]]);
    CHECK(static_cast<bool>(mesh.edge_on_boundary[e]) == on_cube_surface(mid));
  }
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const auto& fv = mesh.faces[f].vertices;
    const Eigen::Vector3d fc =
        (mesh.vertices[fv[0]] + mesh.vertices[fv[1]] + mesh.vertices[fv[2]]) / 3.0;
    CHECK(mesh.face_on_boundary(f) == on_cube_surface(fc));
  }
}

TEST_CASE("mesh sizes") {
  for (int n : {1, 2, 4}) {
    CAPTURE(n);
    const Mesh mesh = generate_cube_mesh(n);
    CHECK(mesh.h == doctest::Approx(std::sqrt(3.0) / n).epsilon(1e-13));
    for (double hk : mesh.h_K) CHECK(hk == doctest::Approx(std::sqrt(3.0) / n).epsilon(1e-13));
    const MeshSizes sizes = mesh_sizes(mesh);
    CHECK(sizes.h == mesh.h);
    REQUIRE(sizes.h_F.size() == mesh.faces.size());
    for (int f = 0; f < mesh.n_faces(); ++f) CHECK(sizes.h_F[f] == mesh.faces[f].diameter);
  }
}

TEST_CASE("reference map round trip") {
  const Mesh mesh = generate_cube_mesh(2);
  const Eigen::Vector3d xhat(0.21, 0.33, 0.17);
  for (int t = 0; t < mesh.n_tets(); t += 7) {
    const Eigen::Vector3d x = mesh.from_reference(t, xhat);
    CHECK((mesh.to_reference(t, x) - xhat).norm() < 1e-13);
  }
}

TEST_CASE("degenerate and non-manifold inputs are rejected") {
  Mesh flat;
  flat.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  flat.tets = {{0, 1, 2, 3}};
  CHECK_THROWS_WITH_AS(build_topology(flat), doctest::Contains("degenerate"),
                       std::runtime_error);

  // Three tets sharing the face (0,1,2).
  Mesh bad;
  bad.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.3, 0.3, 2.0}, {0.2, 0.2, 3.0}};
  bad.tets = {{0, 1, 2, 3}, {0, 1, 2, 4}, {0, 1, 2, 5}};
  for (auto& tet : bad.tets) {
    Eigen::Matrix3d J;
    for (int c = 0; c < 3; ++c) J.col(c) = bad.vertices[tet[c + 1]] - bad.vertices[tet[0]];
    if (J.determinant() < 0) std::swap(tet[1], tet[2]);
  }
  CHECK_THROWS_WITH_AS(build_topology(bad), doctest::Contains("non-manifold"),
                       std::runtime_error);
}

namespace {

// A two-tet MSH 2.2 body: unit tet plus its reflection through the x=y plane,
// written with one negatively oriented cell and some skippable elements.
const char* kTwoTetMsh =
    "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
    "$Nodes\n5\n"
    "1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n5 1 1 1\n"
    "$EndNodes\n"
    "$Elements\n4\n"
    "1 15 2 0 1 1\n"
    "2 2 2 0 1 1 2 3\n"
    "3 4 2 0 1 1 2 3 4\n"
    "4 4 2 0 1 4 2 3 5\n"
    "$EndElements\n";

}  // namespace

TEST_CASE("gmsh reader builds a conforming mesh and fixes orientation") {
  std::istringstream in(kTwoTetMsh);
  const Mesh mesh = read_gmsh(in, "two_tet.msh");
  CHECK(mesh.n_vertices() == 5);
  CHECK(mesh.n_tets() == 2);
  CHECK(mesh.n_faces() == 7);
  CHECK(mesh.n_boundary_faces() == 6);
  for (int t = 0; t < mesh.n_tets(); ++t) CHECK(mesh.volume(t) > 0.0);
}

TEST_CASE("gmsh reader skips unknown sections") {
  std::string body(kTwoTetMsh);
  body += "$Periodic\n0\n$EndPeriodic\n";
  std::istringstream in(body);
  CHECK(read_gmsh(in, "sectioned.msh").n_tets() == 2);
}

TEST_CASE("gmsh reader error cases") {
  auto parse = [](const std::string& body, const std::string& name) {
    std::istringstream in(body);
    return read_gmsh(in, name);
  };

  CHECK_THROWS_WITH_AS(
      parse("$MeshFormat\n4.1 0 8\n$EndMeshFormat\n", "v4.msh"),
      doctest::Contains("unsupported MSH format"), std::runtime_error);

  CHECK_THROWS_WITH_AS(
      parse("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
            "$Nodes\n1\n1 0 0 0\n$EndNodes\n"
            "$Elements\n1\n1 5 0 1 2 3 4 5 6 7 8\n$EndElements\n",
            "hex.msh"),
      doctest::Contains("unsupported element type 5"), std::runtime_error);

  CHECK_THROWS_WITH_AS(
      parse("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
            "$Nodes\n3\n1 0 0 0\n2 1 0 0\n3 0 1 0\n$EndNodes\n"
            "$Elements\n1\n1 2 0 1 2 3\n$EndElements\n",
            "tri_only.msh"),
      doctest::Contains("no tetrahedra"), std::runtime_error);

  CHECK_THROWS_WITH_AS(
      parse("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
            "$Nodes\n2\n1 0 0 0\n1 1 0 0\n$EndNodes\n"
            "$Elements\n0\n$EndElements\n",
            "dup.msh"),
      doctest::Contains("duplicate node id"), std::runtime_error);

  CHECK_THROWS_AS(read_gmsh("no_such_file.msh"), std::runtime_error);
}

TEST_CASE("gmsh reader rejects hanging vertices") {
  // Two tets stacked so that vertex 5 sits in the middle of the boundary
  // face (1,2,4) of the lower tet: conforming as a vertex list, but the
  // faces do not match up.
  const char* body =
      "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
      "$Nodes\n6\n"
      "1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n"
      "5 0.25 0 0.25\n6 0.3 -1 0.3\n"
      "$EndNodes\n"
      "$Elements\n2\n"
      "1 4 0 1 2 3 4\n"
      "2 4 0 1 2 5 6\n"
      "$EndElements\n";
  std::istringstream in(body);
  CHECK_THROWS_WITH_AS(read_gmsh(in, "hanging.msh"), doctest::Contains("hanging vertex"),
                       std::runtime_error);
}

TEST_CASE("topology json carries counts and per-face data") {
  const Mesh mesh = generate_cube_mesh(1);
  const nlohmann::json j = topology_json(mesh);
  CHECK(j["n_vertices"] == 8);
  CHECK(j["n_tets"] == 6);
  CHECK(j["n_faces"] == 18);
  CHECK(j["n_edges"] == 19);
  CHECK(j["n_boundary_faces"] == 12);
  CHECK(j["faces"].size() == 18);
  CHECK(j["edges"].size() == 19);
  CHECK(j["faces"][0].contains("normal"));
}
