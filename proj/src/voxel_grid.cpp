#include "rockperm/voxel_grid.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "rockperm/errors.hpp"

namespace rockperm {

std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "?";
}

std::string_view to_string(Rotation rotation) {
  switch (rotation) {
    case Rotation::none: return "none";
    case Rotation::y90: return "y90";
    case Rotation::z90: return "z90";
  }
  return "?";
}

Axis parse_axis(std::string_view text) {
  if (text == "x") return Axis::x;
  if (text == "y") return Axis::y;
  if (text == "z") return Axis::z;
  throw FormatError("unknown axis '" + std::string(text) + "'");
}

Rotation parse_rotation(std::string_view text) {
  if (text == "none") return Rotation::none;
  if (text == "y90") return Rotation::y90;
  if (text == "z90") return Rotation::z90;
  throw FormatError("unknown rotation '" + std::string(text) + "'");
}

Axis flow_axis_of(Rotation rotation) {
  switch (rotation) {
    case Rotation::none: return Axis::x;
    case Rotation::y90: return Axis::z;
    case Rotation::z90: return Axis::y;
  }
  return Axis::x;
}

std::size_t raw_byte_count(Dims dims) { return (dims.count() + 7) / 8; }

VoxelGrid::VoxelGrid(Dims dims, double voxel_edge) : dims_(dims), voxel_edge_(voxel_edge) {
  if (dims.nx <= 0 || dims.ny <= 0 || dims.nz <= 0)
    throw ArgumentError("grid dimensions must be positive");
  bytes_.assign(raw_byte_count(dims), 0);
}

void VoxelGrid::fill(bool is_fluid) {
  std::fill(bytes_.begin(), bytes_.end(), is_fluid ? 0xFF : 0x00);
  // Padding bits past the last voxel stay zero so byte comparison stays exact.
  const std::size_t tail = size() & 7u;
  if (is_fluid && tail != 0) bytes_.back() = static_cast<std::uint8_t>((1u << tail) - 1u);
}

std::size_t VoxelGrid::fluid_count() const {
  std::size_t n = 0;
  for (auto b : bytes_) n += static_cast<std::size_t>(std::popcount(b));
  return n;
}

VoxelGrid load_raw(const std::filesystem::path& path, Dims dims, double voxel_edge) {
  VoxelGrid grid(dims, voxel_edge);
  const std::size_t expected = raw_byte_count(dims);

  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open raw file " + path.string());
  in.seekg(0, std::ios::end);
  const auto actual = static_cast<std::size_t>(in.tellg());
  if (actual != expected) {
    throw FormatError("raw file " + path.string() + " has " + std::to_string(actual) + " bytes, expected " +
                      std::to_string(expected) + " for " + std::to_string(dims.nx) + "x" + std::to_string(dims.ny) +
                      "x" + std::to_string(dims.nz));
  }
  in.seekg(0);
  in.read(reinterpret_cast<char*>(grid.bytes_.data()), static_cast<std::streamsize>(expected));
  if (!in) throw FormatError("short read on " + path.string());

  const std::size_t tail = grid.size() & 7u;
  if (tail != 0) grid.bytes_.back() &= static_cast<std::uint8_t>((1u << tail) - 1u);
  return grid;
}

void save_raw(const VoxelGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(grid.bytes().data()), static_cast<std::streamsize>(grid.bytes().size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<std::array<int, 3>> frame_origins(Dims dims, int size, int stride) {
  if (size <= 0 || stride < 1) throw ArgumentError("frame size must be positive and stride >= 1");
  if (size > dims.nx || size > dims.ny || size > dims.nz)
    throw ArgumentError("frame size " + std::to_string(size) + " exceeds grid dimensions");

  std::vector<std::array<int, 3>> origins;
  for (int oz = 0; oz + size <= dims.nz; oz += stride)
    for (int oy = 0; oy + size <= dims.ny; oy += stride)
      for (int ox = 0; ox + size <= dims.nx; ox += stride) origins.push_back({ox, oy, oz});
  return origins;
}

VoxelGrid extract_frame(const VoxelGrid& grid, const std::array<int, 3>& origin, int size) {
  const Dims& d = grid.dims();
  if (origin[0] < 0 || origin[1] < 0 || origin[2] < 0 || origin[0] + size > d.nx || origin[1] + size > d.ny ||
      origin[2] + size > d.nz)
    throw ArgumentError("frame does not fit inside the grid");

  VoxelGrid frame({size, size, size}, grid.voxel_edge());
  for (int z = 0; z < size; ++z)
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x)
        if (grid.fluid(origin[0] + x, origin[1] + y, origin[2] + z)) frame.set(x, y, z, true);
  return frame;
}

std::vector<Subsample> extract_subsamples(const VoxelGrid& grid, int size, int stride) {
  std::vector<Subsample> out;
  for (const auto& origin : frame_origins(grid.dims(), size, stride))
    out.push_back({extract_frame(grid, origin, size), SubsampleMeta{origin, Rotation::none, Axis::x}});
  return out;
}

VoxelGrid rotate90(const VoxelGrid& grid, Axis axis) {
  const Dims& d = grid.dims();
  if (!d.is_cube()) throw ArgumentError("rotate90 requires a cubic grid");
  if (axis == Axis::x) throw ArgumentError("rotate90 supports the y and z axes only");

  const int n = d.nx;
  VoxelGrid out(d, grid.voxel_edge());
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        if (!grid.fluid(x, y, z)) continue;
        if (axis == Axis::y)
          out.set(z, y, n - 1 - x, true);  // (x, y, z) -> (z, y, n-1-x)
        else
          out.set(y, n - 1 - x, z, true);  // (x, y, z) -> (y, n-1-x, z)
      }
  return out;
}

VoxelGrid apply_rotation(const VoxelGrid& grid, Rotation rotation) {
  switch (rotation) {
    case Rotation::none: return grid;
    case Rotation::y90: return rotate90(grid, Axis::y);
    case Rotation::z90: return rotate90(grid, Axis::z);
  }
  return grid;
}

namespace {

// Calls f(neighbour_linear_index) for every in-domain face neighbour of (x, y, z).
template <typename F>
void for_each_face_neighbour(const Dims& d, int x, int y, int z, std::size_t linear, F&& f) {
  const std::size_t sx = 1;
  const std::size_t sy = static_cast<std::size_t>(d.nx);
  const std::size_t sz = sy * static_cast<std::size_t>(d.ny);
  if (x > 0) f(linear - sx);
  if (x + 1 < d.nx) f(linear + sx);
  if (y > 0) f(linear - sy);
  if (y + 1 < d.ny) f(linear + sy);
  if (z > 0) f(linear - sz);
  if (z + 1 < d.nz) f(linear + sz);
}

}  // namespace

ComponentLabels label_components(const VoxelGrid& grid) {
  const Dims& d = grid.dims();
  ComponentLabels result;
  result.labels.assign(grid.size(), 0);

  std::vector<std::size_t> stack;
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x) {
        const std::size_t seed = grid.index(x, y, z);
        if (!grid.fluid(seed) || result.labels[seed] != 0) continue;

        const std::int32_t label = ++result.count;
        result.labels[seed] = label;
        stack.push_back(seed);
        while (!stack.empty()) {
          const std::size_t cur = stack.back();
          stack.pop_back();
          const int cx = static_cast<int>(cur % static_cast<std::size_t>(d.nx));
          const int cy = static_cast<int>((cur / static_cast<std::size_t>(d.nx)) % static_cast<std::size_t>(d.ny));
          const int cz = static_cast<int>(cur / (static_cast<std::size_t>(d.nx) * static_cast<std::size_t>(d.ny)));
          for_each_face_neighbour(d, cx, cy, cz, cur, [&](std::size_t nb) {
            if (grid.fluid(nb) && result.labels[nb] == 0) {
              result.labels[nb] = label;
              stack.push_back(nb);
            }
          });
        }
      }
  return result;
}

PercolationResult retain_percolating(const VoxelGrid& grid, Axis axis) {
  const Dims& d = grid.dims();
  const ComponentLabels comp = label_components(grid);

  std::vector<std::uint8_t> touches(static_cast<std::size_t>(comp.count) + 1, 0);  // bit0 = low face, bit1 = high face
  const int n_axis = d[axis];
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x) {
        const std::int32_t label = comp.labels[grid.index(x, y, z)];
        if (label == 0) continue;
        const int c = axis == Axis::x ? x : (axis == Axis::y ? y : z);
        if (c == 0) touches[static_cast<std::size_t>(label)] |= 1u;
        if (c == n_axis - 1) touches[static_cast<std::size_t>(label)] |= 2u;
      }

  PercolationResult result{VoxelGrid(d, grid.voxel_edge()), false};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::int32_t label = comp.labels[i];
    if (label != 0 && touches[static_cast<std::size_t>(label)] == 3u) {
      result.grid.set(i, true);
      result.permeable = true;
    }
  }
  return result;
}

double porosity(const VoxelGrid& grid) {
  if (grid.size() == 0) return 0.0;
  return static_cast<double>(grid.fluid_count()) / static_cast<double>(grid.size());
}

std::size_t fluid_adjacency_count(const VoxelGrid& grid) {
  const Dims& d = grid.dims();
  std::size_t edges = 0;
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x) {
        if (!grid.fluid(x, y, z)) continue;
        if (x + 1 < d.nx && grid.fluid(x + 1, y, z)) ++edges;
        if (y + 1 < d.ny && grid.fluid(x, y + 1, z)) ++edges;
        if (z + 1 < d.nz && grid.fluid(x, y, z + 1)) ++edges;
      }
  return edges;
}

SurfaceArea surface_area(const VoxelGrid& grid) {
  const auto nodes = static_cast<std::int64_t>(grid.fluid_count());
  const auto edges = static_cast<std::int64_t>(fluid_adjacency_count(grid));
  SurfaceArea s;
  s.face_count = 6 * nodes - 2 * edges;
  const double h = grid.voxel_edge();
  s.area = static_cast<double>(s.face_count) * h * h;
  const auto solid = static_cast<double>(grid.size()) - static_cast<double>(nodes);
  s.specific_area = solid > 0 ? s.area / (solid * h * h * h) : 0.0;
  return s;
}

VoxelGrid morph(const VoxelGrid& grid, int layers) {
  const Dims& d = grid.dims();
  const int limit = std::min({d.nx, d.ny, d.nz}) / 2;
  if (std::abs(layers) > limit)
    throw ArgumentError("morph: |layers| = " + std::to_string(std::abs(layers)) + " exceeds min(dims)/2 = " +
                        std::to_string(limit));

  VoxelGrid current = grid;
  const bool dilate = layers > 0;
  for (int step = 0; step < std::abs(layers); ++step) {
    VoxelGrid next = current;
    for (int z = 0; z < d.nz; ++z)
      for (int y = 0; y < d.ny; ++y)
        for (int x = 0; x < d.nx; ++x) {
          const std::size_t i = current.index(x, y, z);
          // Dilation adds solid voxels next to fluid; erosion removes fluid voxels next to solid.
          if (current.fluid(i) == dilate) continue;
          bool flip = false;
          for_each_face_neighbour(d, x, y, z, i, [&](std::size_t nb) { flip = flip || current.fluid(nb) == dilate; });
          if (flip) next.set(i, dilate);
        }
    current = std::move(next);
  }
  return current;
}

void write_ascii_slices(const VoxelGrid& grid, std::ostream& out) {
  const Dims& d = grid.dims();
  for (int z = 0; z < d.nz; ++z) {
    out << "z " << z << '\n';
    for (int y = 0; y < d.ny; ++y) {
      for (int x = 0; x < d.nx; ++x) out << (grid.fluid(x, y, z) ? '1' : '0');
      out << '\n';
    }
    out << '\n';
  }
}

VoxelGrid grid_from_rows(const std::vector<std::string_view>& rows, double voxel_edge) {
  if (rows.empty()) throw ArgumentError("grid_from_rows: no rows");
  const int nx = static_cast<int>(rows.front().size());
  VoxelGrid grid({nx, static_cast<int>(rows.size()), 1}, voxel_edge);
  for (std::size_t y = 0; y < rows.size(); ++y) {
    if (static_cast<int>(rows[y].size()) != nx) throw ArgumentError("grid_from_rows: ragged rows");
    for (int x = 0; x < nx; ++x) {
      const char c = rows[y][static_cast<std::size_t>(x)];
      if (c != '0' && c != '1') throw ArgumentError("grid_from_rows: expected '0' or '1'");
      grid.set(x, static_cast<int>(y), 0, c == '1');
    }
  }
  return grid;
}

}  // namespace rockperm
