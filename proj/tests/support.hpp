#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "rockperm/voxel_grid.hpp"

namespace rockperm::testing {

/// Scratch directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("rockperm-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline VoxelGrid random_grid(Dims d, double fluid_fraction, std::uint64_t seed, double voxel_edge = 1.0) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(fluid_fraction);
  VoxelGrid g(d, voxel_edge);
  for (std::size_t i = 0; i < g.size(); ++i) g.set(i, coin(rng));
  return g;
}

/// Straight duct along x through the voxel box [y0, y0+wy) x [z0, z0+wz).
inline VoxelGrid duct(Dims d, int y0, int wy, int z0, int wz, double voxel_edge = 1.0) {
  VoxelGrid g(d, voxel_edge);
  for (int z = z0; z < z0 + wz; ++z)
    for (int y = y0; y < y0 + wy; ++y)
      for (int x = 0; x < d.nx; ++x) g.set(x, y, z, true);
  return g;
}

}  // namespace rockperm::testing
