#pragma once

#include <iosfwd>

#include "rockperm/stokes/assembly.hpp"
#include "rockperm/stokes/solver.hpp"

namespace rockperm::stokes {

/// Legacy-VTK ASCII unstructured grid of the mesh cells (VTK_HEXAHEDRON = 12)
/// with POINT_DATA "velocity" (3-vector at every cell vertex) and CELL_DATA
/// "pressure" (cell mean). Coordinates are in unit-cube units. Layout is
/// described in docs/field_format.md.
void write_vtk(std::ostream& out, const StokesSystem& system, const FlowSolution& solution);

}  // namespace rockperm::stokes
