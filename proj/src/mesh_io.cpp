#include "qc/mesh_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace qc {

namespace {

[[noreturn]] void fail(const std::string& name, int line, const std::string& what) {
  throw std::runtime_error(name + ":" + std::to_string(line) + ": " + what);
}

std::string next_line(std::istream& in, const std::string& name, int& line) {
  std::string s;
  if (!std::getline(in, s)) fail(name, line, "unexpected end of file");
  ++line;
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

// Nodes per element for the MSH types we tolerate but do not keep.
int skipped_type_nodes(int type) {
  switch (type) {
    case 15: return 1;  // point
    case 1: return 2;   // line
    case 2: return 3;   // triangle
    default: return -1;
  }
}

void check_hanging_vertices(const Mesh& mesh, const std::string& name) {
  const double tol = 1e-10;
  for (const auto& f : mesh.faces) {
    if (!f.is_boundary()) continue;
    const Eigen::Vector3d a = mesh.vertices[f.vertices[0]];
    const Eigen::Vector3d b = mesh.vertices[f.vertices[1]];
    const Eigen::Vector3d c = mesh.vertices[f.vertices[2]];
    const double scale = f.diameter;
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      if (v == f.vertices[0] || v == f.vertices[1] || v == f.vertices[2]) continue;
      const Eigen::Vector3d x = mesh.vertices[v];
      if ((x - a).dot(f.normal) > tol * scale || (x - a).dot(f.normal) < -tol * scale) continue;
      // Barycentric coordinates of x within the face.
      Eigen::Matrix2d M;
      M << (b - a).squaredNorm(), (b - a).dot(c - a), (b - a).dot(c - a), (c - a).squaredNorm();
      const Eigen::Vector2d rhs((x - a).dot(b - a), (x - a).dot(c - a));
      const Eigen::Vector2d st = M.inverse() * rhs;
      const double s = st[0], t = st[1];
      if (s < -tol || t < -tol || s + t > 1.0 + tol) continue;
      if ((x - a).norm() < tol * scale || (x - b).norm() < tol * scale ||
          (x - c).norm() < tol * scale)
        continue;
      throw std::runtime_error(name + ": hanging vertex " + std::to_string(v) +
                               " detected on a boundary face (nonconforming mesh)");
    }
  }
}

}  // namespace

Mesh read_gmsh(std::istream& in, const std::string& name) {
  int line = 0;
  Mesh mesh;
  std::unordered_map<long, int> node_index;
  bool saw_nodes = false, saw_elements = false;

  std::string s;
  while (std::getline(in, s)) {
    ++line;
    if (!s.empty() && s.back() == '\r') s.pop_back();
    if (s.empty()) continue;

    if (s == "$MeshFormat") {
      std::istringstream fmt(next_line(in, name, line));
      double version = 0;
      int file_type = 0, data_size = 0;
      if (!(fmt >> version >> file_type >> data_size))
        fail(name, line, "malformed $MeshFormat header");
      if (version < 2.0 || version >= 3.0 || file_type != 0)
        fail(name, line, "unsupported MSH format (need ASCII version 2.x)");
      if (next_line(in, name, line) != "$EndMeshFormat")
        fail(name, line, "expected $EndMeshFormat");
    } else if (s == "$Nodes") {
      saw_nodes = true;
      std::istringstream cnt(next_line(in, name, line));
      long n = 0;
      if (!(cnt >> n) || n < 0) fail(name, line, "malformed node count");
      mesh.vertices.reserve(static_cast<size_t>(n));
      for (long i = 0; i < n; ++i) {
        std::istringstream row(next_line(in, name, line));
        long id = 0;
        double x = 0, y = 0, z = 0;
        if (!(row >> id >> x >> y >> z)) fail(name, line, "malformed node line");
        if (!node_index.emplace(id, static_cast<int>(mesh.vertices.size())).second)
          fail(name, line, "duplicate node id " + std::to_string(id));
        mesh.vertices.emplace_back(x, y, z);
      }
      if (next_line(in, name, line) != "$EndNodes") fail(name, line, "expected $EndNodes");
    } else if (s == "$Elements") {
      saw_elements = true;
      std::istringstream cnt(next_line(in, name, line));
      long n = 0;
      if (!(cnt >> n) || n < 0) fail(name, line, "malformed element count");
      for (long i = 0; i < n; ++i) {
        std::istringstream row(next_line(in, name, line));
        long id = 0;
        int type = 0, ntags = 0;
        if (!(row >> id >> type >> ntags)) fail(name, line, "malformed element line");
        long tag = 0;
        for (int t = 0; t < ntags; ++t)
          if (!(row >> tag)) fail(name, line, "malformed element tags");
        if (type == 4) {
          std::array<int, 4> tet{};
          for (int v = 0; v < 4; ++v) {
            long nid = 0;
            if (!(row >> nid)) fail(name, line, "tetrahedron with fewer than 4 nodes");
            auto it = node_index.find(nid);
            if (it == node_index.end())
              fail(name, line, "element references unknown node " + std::to_string(nid));
            tet[v] = it->second;
          }
          mesh.tets.push_back(tet);
        } else {
          const int nn = skipped_type_nodes(type);
          if (nn < 0)
            fail(name, line, "unsupported element type " + std::to_string(type));
          long nid = 0;
          for (int v = 0; v < nn; ++v)
            if (!(row >> nid)) fail(name, line, "malformed element line");
        }
      }
      if (next_line(in, name, line) != "$EndElements") fail(name, line, "expected $EndElements");
    } else if (s[0] == '$' && s.rfind("$End", 0) != 0) {
      // Unknown section: skip to its matching end marker.
      const std::string end = "$End" + s.substr(1);
      while (next_line(in, name, line) != end) {
      }
    }
  }

  if (!saw_nodes) fail(name, line, "missing $Nodes section");
  if (!saw_elements) fail(name, line, "missing $Elements section");
  if (mesh.tets.empty()) throw std::runtime_error(name + ": no tetrahedra in mesh");

  // Gmsh does not promise positively oriented tets; fix orientation here so
  // build_topology's orientation check only fires on genuinely degenerate cells.
  for (auto& tet : mesh.tets) {
    Eigen::Matrix3d J;
    for (int c = 0; c < 3; ++c)
      J.col(c) = mesh.vertices[tet[c + 1]] - mesh.vertices[tet[0]];
    if (J.determinant() < 0.0) std::swap(tet[1], tet[2]);
  }

  build_topology(mesh);
  check_hanging_vertices(mesh, name);
  return mesh;
}

Mesh read_gmsh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open mesh file");
  return read_gmsh(in, path);
}

nlohmann::json topology_json(const Mesh& mesh) {
  nlohmann::json j;
  j["n_vertices"] = mesh.n_vertices();
  j["n_tets"] = mesh.n_tets();
  j["n_faces"] = mesh.n_faces();
  j["n_edges"] = mesh.n_edges();
  j["n_boundary_faces"] = mesh.n_boundary_faces();
  j["n_boundary_edges"] = mesh.n_boundary_edges();
  j["h"] = mesh.h;

  nlohmann::json faces = nlohmann::json::array();
  for (const auto& f : mesh.faces) {
    faces.push_back({{"vertices", f.vertices},
                     {"owner", f.owner},
                     {"neighbor", f.neighbor},
                     {"area", f.area},
                     {"diameter", f.diameter},
                     {"normal", {f.normal[0], f.normal[1], f.normal[2]}}});
  }
  j["faces"] = std::move(faces);

  nlohmann::json edges = nlohmann::json::array();
  for (int e = 0; e < mesh.n_edges(); ++e)
    edges.push_back({{"vertices", mesh.edges[e]},
                     {"on_boundary", static_cast<bool>(mesh.edge_on_boundary[e])}});
  j["edges"] = std::move(edges);
  return j;
}

}  // namespace qc
