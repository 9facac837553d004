#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rockperm/voxel_grid.hpp"

namespace rockperm::stokes {

enum class BoundaryTag : std::uint8_t { inflow, outflow, wall };

/// Face numbering of a hexahedron: 0 = -x, 1 = +x, 2 = -y, 3 = +y, 4 = -z, 5 = +z.
struct BoundaryFace {
  std::int32_t cell = 0;
  std::uint8_t face = 0;
  BoundaryTag tag = BoundaryTag::wall;
};

/// Fluid voxels inscribed into the unit cube along x, each split into
/// subdivisions^3 cubic cells of edge h = 1 / (nx * subdivisions).
/// inflow/outflow faces together form the traction boundary, wall faces the no-slip boundary.
struct VoxelMesh {
  Dims voxel_dims{};
  int refinement_level = 0;
  int subdivisions = 1;
  double h = 1.0;

  /// Cell lattice coordinates in units of h, in lexicographic order (x fastest).
  std::vector<std::array<int, 3>> cells;
  std::vector<BoundaryFace> boundary_faces;

  std::array<int, 3> cell_extent() const {
    return {voxel_dims.nx * subdivisions, voxel_dims.ny * subdivisions, voxel_dims.nz * subdivisions};
  }
  std::size_t cell_count() const { return cells.size(); }
  std::size_t count(BoundaryTag tag) const;

  /// Index of the cell at lattice coordinates, or -1 when that location is solid or outside.
  std::int32_t find_cell(int i, int j, int k) const;

  std::vector<std::uint64_t> cell_keys;  // sorted, parallel to `cells`
};

/// Throws PreconditionError when no fluid component spans x = 0 to x = 1, or when
/// some component touches neither x face (its pressure would be undetermined).
VoxelMesh build_mesh(const VoxelGrid& grid, int refinement_level);

/// Continuous Lagrange nodes of degree 1 or 2 on a VoxelMesh. Nodes sit on the
/// lattice of spacing h/degree and are numbered in lexicographic lattice order.
struct NodalSpace {
  int degree = 1;
  std::array<std::int64_t, 3> extent{};  // lattice points per axis
  std::vector<std::uint64_t> keys;       // sorted lattice keys, one per node
  std::vector<std::int32_t> cell_nodes;  // cells x (degree+1)^3, local lexicographic order

  int nodes_per_cell() const { return (degree + 1) * (degree + 1) * (degree + 1); }
  std::size_t size() const { return keys.size(); }
  std::array<std::int64_t, 3> lattice(std::size_t node) const;
  std::int32_t find(std::int64_t i, std::int64_t j, std::int64_t k) const;
};

NodalSpace make_nodal_space(const VoxelMesh& mesh, int degree);

/// Local node indices of `face` on a degree-q cell, in face-local lexicographic order.
std::vector<int> face_local_nodes(int degree, int face);

/// Flags nodes lying on the closure of a wall face.
std::vector<char> wall_nodes(const VoxelMesh& mesh, const NodalSpace& space);

}  // namespace rockperm::stokes
