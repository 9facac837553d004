#include "rockperm/stokes/mesh.hpp"

#include <algorithm>

#include "rockperm/errors.hpp"

namespace rockperm::stokes {

namespace {

std::uint64_t lattice_key(const std::array<std::int64_t, 3>& extent, std::int64_t i, std::int64_t j, std::int64_t k) {
  return static_cast<std::uint64_t>(i + extent[0] * (j + extent[1] * k));
}

}  // namespace

std::size_t VoxelMesh::count(BoundaryTag tag) const {
  return static_cast<std::size_t>(
      std::count_if(boundary_faces.begin(), boundary_faces.end(), [tag](const BoundaryFace& f) { return f.tag == tag; }));
}

std::int32_t VoxelMesh::find_cell(int i, int j, int k) const {
  const auto ext = cell_extent();
  if (i < 0 || j < 0 || k < 0 || i >= ext[0] || j >= ext[1] || k >= ext[2]) return -1;
  const std::array<std::int64_t, 3> e{ext[0], ext[1], ext[2]};
  const auto key = lattice_key(e, i, j, k);
  const auto it = std::lower_bound(cell_keys.begin(), cell_keys.end(), key);
  if (it == cell_keys.end() || *it != key) return -1;
  return static_cast<std::int32_t>(it - cell_keys.begin());
}

VoxelMesh build_mesh(const VoxelGrid& grid, int refinement_level) {
  if (refinement_level < 0 || refinement_level > 6) throw ArgumentError("refinement level must be in [0, 6]");

  // Every component must reach a traction face, and one must span both.
  const ComponentLabels comp = label_components(grid);
  const Dims& d = grid.dims();
  std::vector<std::uint8_t> touches(static_cast<std::size_t>(comp.count) + 1, 0);
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y) {
      if (auto l = comp.labels[grid.index(0, y, z)]) touches[static_cast<std::size_t>(l)] |= 1u;
      if (auto l = comp.labels[grid.index(d.nx - 1, y, z)]) touches[static_cast<std::size_t>(l)] |= 2u;
    }
  bool spanning = false;
  for (std::int32_t l = 1; l <= comp.count; ++l) {
    if (touches[static_cast<std::size_t>(l)] == 0)
      throw PreconditionError("fluid component " + std::to_string(l) +
                              " touches neither x face; prune the grid with retain_percolating first");
    spanning = spanning || touches[static_cast<std::size_t>(l)] == 3u;
  }
  if (!spanning) throw PreconditionError("grid does not percolate in x; nothing to mesh");

  VoxelMesh mesh;
  mesh.voxel_dims = d;
  mesh.refinement_level = refinement_level;
  mesh.subdivisions = 1 << refinement_level;
  mesh.h = 1.0 / (static_cast<double>(d.nx) * mesh.subdivisions);

  const int s = mesh.subdivisions;
  const auto ext = mesh.cell_extent();
  const std::array<std::int64_t, 3> e{ext[0], ext[1], ext[2]};
  for (int k = 0; k < ext[2]; ++k)
    for (int j = 0; j < ext[1]; ++j)
      for (int i = 0; i < ext[0]; ++i)
        if (grid.fluid(i / s, j / s, k / s)) {
          mesh.cells.push_back({i, j, k});
          mesh.cell_keys.push_back(lattice_key(e, i, j, k));
        }

  static constexpr int offsets[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto& cell = mesh.cells[c];
    for (std::uint8_t f = 0; f < 6; ++f) {
      const int ni = cell[0] + offsets[f][0], nj = cell[1] + offsets[f][1], nk = cell[2] + offsets[f][2];
      const bool inside = ni >= 0 && nj >= 0 && nk >= 0 && ni < ext[0] && nj < ext[1] && nk < ext[2];
      if (inside && grid.fluid(ni / s, nj / s, nk / s)) continue;
      BoundaryTag tag = BoundaryTag::wall;
      if (f == 0 && ni < 0) tag = BoundaryTag::inflow;
      if (f == 1 && ni >= ext[0]) tag = BoundaryTag::outflow;
      mesh.boundary_faces.push_back({static_cast<std::int32_t>(c), f, tag});
    }
  }
  return mesh;
}

std::array<std::int64_t, 3> NodalSpace::lattice(std::size_t node) const {
  const auto key = static_cast<std::int64_t>(keys[node]);
  return {key % extent[0], (key / extent[0]) % extent[1], key / (extent[0] * extent[1])};
}

std::int32_t NodalSpace::find(std::int64_t i, std::int64_t j, std::int64_t k) const {
  if (i < 0 || j < 0 || k < 0 || i >= extent[0] || j >= extent[1] || k >= extent[2]) return -1;
  const auto key = lattice_key(extent, i, j, k);
  const auto it = std::lower_bound(keys.begin(), keys.end(), key);
  if (it == keys.end() || *it != key) return -1;
  return static_cast<std::int32_t>(it - keys.begin());
}

NodalSpace make_nodal_space(const VoxelMesh& mesh, int degree) {
  if (degree != 1 && degree != 2) throw ArgumentError("nodal spaces support degree 1 or 2");
  NodalSpace space;
  space.degree = degree;
  const auto ext = mesh.cell_extent();
  for (int a = 0; a < 3; ++a) space.extent[a] = static_cast<std::int64_t>(ext[a]) * degree + 1;

  const int n1 = degree + 1;
  std::vector<std::uint64_t> local_keys;
  local_keys.reserve(mesh.cells.size() * static_cast<std::size_t>(space.nodes_per_cell()));
  for (const auto& cell : mesh.cells)
    for (int k = 0; k < n1; ++k)
      for (int j = 0; j < n1; ++j)
        for (int i = 0; i < n1; ++i)
          local_keys.push_back(lattice_key(space.extent, static_cast<std::int64_t>(cell[0]) * degree + i,
                                           static_cast<std::int64_t>(cell[1]) * degree + j,
                                           static_cast<std::int64_t>(cell[2]) * degree + k));

  space.keys = local_keys;
  std::sort(space.keys.begin(), space.keys.end());
  space.keys.erase(std::unique(space.keys.begin(), space.keys.end()), space.keys.end());

  space.cell_nodes.resize(local_keys.size());
  for (std::size_t i = 0; i < local_keys.size(); ++i) {
    const auto it = std::lower_bound(space.keys.begin(), space.keys.end(), local_keys[i]);
    space.cell_nodes[i] = static_cast<std::int32_t>(it - space.keys.begin());
  }
  return space;
}

std::vector<int> face_local_nodes(int degree, int face) {
  const int n1 = degree + 1;
  const int axis = face / 2;
  const int u = axis == 0 ? 1 : 0;  // remaining axes in increasing order, u fastest
  const int v = axis == 2 ? 1 : 2;
  std::vector<int> nodes;
  nodes.reserve(static_cast<std::size_t>(n1 * n1));
  for (int b = 0; b < n1; ++b)
    for (int a = 0; a < n1; ++a) {
      int ijk[3];
      ijk[axis] = (face % 2 == 0) ? 0 : degree;
      ijk[u] = a;
      ijk[v] = b;
      nodes.push_back(ijk[0] + n1 * (ijk[1] + n1 * ijk[2]));
    }
  return nodes;
}

std::vector<char> wall_nodes(const VoxelMesh& mesh, const NodalSpace& space) {
  std::vector<char> flag(space.size(), 0);
  const int npc = space.nodes_per_cell();
  for (const auto& f : mesh.boundary_faces) {
    if (f.tag != BoundaryTag::wall) continue;
    for (int local : face_local_nodes(space.degree, f.face))
      flag[static_cast<std::size_t>(space.cell_nodes[static_cast<std::size_t>(f.cell) * npc + local])] = 1;
  }
  return flag;
}

}  // namespace rockperm::stokes
