#include "rockperm/stokes/field_export.hpp"

#include <ostream>

#include "rockperm/stokes/reference_element.hpp"

namespace rockperm::stokes {

void write_vtk(std::ostream& out, const StokesSystem& system, const FlowSolution& solution) {
  const VoxelMesh& mesh = system.mesh;
  const NodalSpace vertices = make_nodal_space(mesh, 1);
  const NodalSpace& vel = system.velocity_space;
  const int q = vel.degree;
  const Eigen::Index nv = system.velocity_nodes();

  out.precision(10);
  out << "# vtk DataFile Version 3.0\n"
      << "rockperm stokes field order " << system.order << " level " << mesh.refinement_level << "\n"
      << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << vertices.size() << " double\n";
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    const auto l = vertices.lattice(v);
    out << l[0] * mesh.h << ' ' << l[1] * mesh.h << ' ' << l[2] * mesh.h << '\n';
  }

  // VTK hexahedron vertex order: bottom face counter-clockwise, then top face.
  static constexpr int corner[8] = {0, 1, 3, 2, 4, 5, 7, 6};
  out << "CELLS " << mesh.cell_count() << ' ' << mesh.cell_count() * 9 << '\n';
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    out << 8;
    for (int k : corner) out << ' ' << vertices.cell_nodes[c * 8 + static_cast<std::size_t>(k)];
    out << '\n';
  }
  out << "CELL_TYPES " << mesh.cell_count() << '\n';
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) out << "12\n";

  out << "POINT_DATA " << vertices.size() << "\nVECTORS velocity double\n";
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    const auto l = vertices.lattice(v);
    const auto node = vel.find(l[0] * q, l[1] * q, l[2] * q);
    out << solution.velocity(node) << ' ' << solution.velocity(nv + node) << ' ' << solution.velocity(2 * nv + node)
        << '\n';
  }

  out << "CELL_DATA " << mesh.cell_count() << "\nSCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    double p = 0;
    if (system.order == 0) {
      p = solution.pressure(static_cast<Eigen::Index>(c));
    } else {
      for (int k = 0; k < 8; ++k) p += 0.125 * solution.pressure(system.pressure_space.cell_nodes[c * 8 + static_cast<std::size_t>(k)]);
    }
    out << p << '\n';
  }
}

}  // namespace rockperm::stokes
