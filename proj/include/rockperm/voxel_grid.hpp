#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace rockperm {

enum class Axis : std::uint8_t { x = 0, y = 1, z = 2 };

/// Rotation applied to a cubic subsample before it is analyzed along its own x axis.
enum class Rotation : std::uint8_t { none, y90, z90 };

std::string_view to_string(Axis axis);
std::string_view to_string(Rotation rotation);
Axis parse_axis(std::string_view text);
Rotation parse_rotation(std::string_view text);

/// Parent-grid axis that becomes the sample x axis under `rotation`.
Axis flow_axis_of(Rotation rotation);

struct Dims {
  int nx = 0;
  int ny = 0;
  int nz = 0;

  std::size_t count() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz);
  }
  int operator[](Axis a) const { return a == Axis::x ? nx : (a == Axis::y ? ny : nz); }
  bool is_cube() const { return nx == ny && ny == nz; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Binary occupancy image. Storage is the on-disk layout: linear index
/// ix + nx*(iy + ny*iz), bit i of byte b holds index 8b+i, 1 = fluid.
class VoxelGrid {
 public:
  VoxelGrid() = default;
  VoxelGrid(Dims dims, double voxel_edge);

  const Dims& dims() const noexcept { return dims_; }
  double voxel_edge() const noexcept { return voxel_edge_; }
  std::size_t size() const noexcept { return dims_.count(); }

  std::size_t index(int ix, int iy, int iz) const {
    return static_cast<std::size_t>(ix) +
           static_cast<std::size_t>(dims_.nx) *
               (static_cast<std::size_t>(iy) + static_cast<std::size_t>(dims_.ny) * static_cast<std::size_t>(iz));
  }

  bool fluid(std::size_t linear) const { return (bytes_[linear >> 3] >> (linear & 7u)) & 1u; }
  bool fluid(int ix, int iy, int iz) const { return fluid(index(ix, iy, iz)); }

  /// Out-of-range coordinates read as solid.
  bool fluid_or_solid(int ix, int iy, int iz) const {
    if (ix < 0 || iy < 0 || iz < 0 || ix >= dims_.nx || iy >= dims_.ny || iz >= dims_.nz) return false;
    return fluid(ix, iy, iz);
  }

  void set(std::size_t linear, bool is_fluid) {
    const auto mask = static_cast<std::uint8_t>(1u << (linear & 7u));
    if (is_fluid)
      bytes_[linear >> 3] |= mask;
    else
      bytes_[linear >> 3] &= static_cast<std::uint8_t>(~mask);
  }
  void set(int ix, int iy, int iz, bool is_fluid) { set(index(ix, iy, iz), is_fluid); }

  void fill(bool is_fluid);

  std::size_t fluid_count() const;

  const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }

  friend bool operator==(const VoxelGrid& a, const VoxelGrid& b) {
    return a.dims_ == b.dims_ && a.bytes_ == b.bytes_;
  }

 private:
  friend VoxelGrid load_raw(const std::filesystem::path&, Dims, double);

  Dims dims_{};
  double voxel_edge_ = 1.0;
  std::vector<std::uint8_t> bytes_;
};

struct SubsampleMeta {
  std::array<int, 3> origin{0, 0, 0};
  Rotation rotation = Rotation::none;
  Axis flow_axis = Axis::x;
};

struct Subsample {
  VoxelGrid grid;
  SubsampleMeta meta;
};

std::size_t raw_byte_count(Dims dims);

VoxelGrid load_raw(const std::filesystem::path& path, Dims dims, double voxel_edge);
void save_raw(const VoxelGrid& grid, const std::filesystem::path& path);

/// Frame origins of a sliding cube of edge `size` moved by `stride`, z slowest.
std::vector<std::array<int, 3>> frame_origins(Dims dims, int size, int stride);

VoxelGrid extract_frame(const VoxelGrid& grid, const std::array<int, 3>& origin, int size);

std::vector<Subsample> extract_subsamples(const VoxelGrid& grid, int size, int stride);

/// Quarter turn about the y or z axis. y90 brings parent z onto sample x,
/// z90 brings parent y onto sample x.
VoxelGrid rotate90(const VoxelGrid& grid, Axis axis);

/// Applies the rotation named in subsample metadata (identity for Rotation::none).
VoxelGrid apply_rotation(const VoxelGrid& grid, Rotation rotation);

/// Face-connected (6-neighbourhood) component labels; 0 = solid, 1..count = component.
struct ComponentLabels {
  std::vector<std::int32_t> labels;
  std::int32_t count = 0;
};
ComponentLabels label_components(const VoxelGrid& grid);

struct PercolationResult {
  VoxelGrid grid;
  bool permeable = false;
};

/// Keeps only components touching both the axis=0 and axis=max faces.
PercolationResult retain_percolating(const VoxelGrid& grid, Axis axis = Axis::x);

double porosity(const VoxelGrid& grid);

/// Number of fluid-fluid face adjacencies.
std::size_t fluid_adjacency_count(const VoxelGrid& grid);

struct SurfaceArea {
  std::int64_t face_count = 0;
  double area = 0.0;           // m^2
  double specific_area = 0.0;  // m^-1, per unit solid volume; 0 when there is no solid
};

/// 6*nodes - 2*edges of the pore graph, i.e. fluid faces against solid and against the domain boundary.
SurfaceArea surface_area(const VoxelGrid& grid);

/// Dilates (layers > 0) or erodes (layers < 0) the fluid set by |layers| face-neighbour steps.
/// Voxels outside the domain do not participate.
VoxelGrid morph(const VoxelGrid& grid, int layers);

/// One block per z slice, rows in increasing y, '1' = fluid.
void write_ascii_slices(const VoxelGrid& grid, std::ostream& out);

/// Builds a grid from rows of '0'/'1' characters; rows[y][x], nz = 1.
VoxelGrid grid_from_rows(const std::vector<std::string_view>& rows, double voxel_edge = 1.0);

}  // namespace rockperm
