#ifndef QC_MESH_IO_HPP
#define QC_MESH_IO_HPP

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "qc/mesh.hpp"

namespace qc {

/// Read a tetrahedral mesh from a Gmsh MSH 2.2 ASCII file.
///
/// Tetrahedra (element type 4) become mesh cells; points, lines and triangles
/// (types 15, 1, 2) are skipped. Any other element type is an error, as are
/// files without tetrahedra, non-manifold connectivity, and meshes where a
/// vertex sits in the interior of another cell's boundary face (a hanging
/// vertex from a nonconforming refinement).
Mesh read_gmsh(const std::string& path);
Mesh read_gmsh(std::istream& in, const std::string& name);

/// Topology summary of a mesh: entity counts, size measures and the
/// face/edge incidence tables, suitable for a JSON dump.
nlohmann::json topology_json(const Mesh& mesh);

}  // namespace qc

#endif
