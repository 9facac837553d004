#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rockperm/voxel_grid.hpp"

namespace rockperm {

inline constexpr int manifest_schema_version = 1;

enum class SampleStatus : std::uint8_t { pending, labeled, impermeable, failed };

std::string_view to_string(SampleStatus status);
SampleStatus parse_status(std::string_view text);

/// One manifest row. Permeabilities are in millidarcy; optional fields are
/// written as empty cells while absent.
struct SampleRecord {
  std::string id;
  std::string file;    // raw file, relative to the manifest directory
  std::string parent;  // source image the frame was cut from
  SubsampleMeta meta;
  double porosity = 0.0;
  std::int64_t face_count = 0;
  double area_m2 = 0.0;
  double specific_area = 0.0;  // 1/m
  std::int64_t f_max = 0;
  SampleStatus status = SampleStatus::pending;
  std::optional<double> k_cmp_mD;
  std::optional<double> k_baseline_mD;
  std::optional<double> k_prd_mD;
  std::optional<int> iterations;
  std::optional<double> residual;
  std::string error;
  std::string split;  // "train", "validation" or empty

  bool permeable() const { return f_max > 0; }

  /// Cells of columns this version does not know, in file order.
  std::vector<std::pair<std::string, std::string>> extra;
};

/// Dataset index: a metadata line, a column header and one row per sample.
///
///   # rockperm-manifest schema=1 voxel_edge=2.25e-06 size=100 stride=50 units=mD
///   id,file,parent,...
struct Manifest {
  int schema = manifest_schema_version;
  double voxel_edge = 1.0;  // m
  int size = 0;             // subsample edge in voxels
  int stride = 0;
  std::string units = "mD";
  std::vector<std::string> extra_columns;
  std::vector<SampleRecord> rows;

  Dims sample_dims() const { return {size, size, size}; }
  /// Characteristic length used to turn Darcy numbers into permeabilities.
  double length_scale() const { return size * voxel_edge; }

  const SampleRecord* find(std::string_view id) const;
};

/// Column names written by this version, in order.
const std::vector<std::string>& manifest_columns();

Manifest read_manifest(std::istream& in);
Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const Manifest& manifest, std::ostream& out);
/// Writes to a temporary sibling first and renames it over `path`.
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

}  // namespace rockperm
