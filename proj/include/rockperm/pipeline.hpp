#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rockperm/manifest.hpp"
#include "rockperm/pore_graph.hpp"
#include "rockperm/stats.hpp"
#include "rockperm/stokes/preconditioner.hpp"
#include "rockperm/stokes/solver.hpp"
#include "rockperm/voxel_grid.hpp"

namespace rockperm {

// ---------------------------------------------------------------------------
// Single-sample flow solve

struct FlowOptions {
  int order = 1;
  int refinement = 0;
  double rel_tol = 1e-6;
  int max_iterations = 50000;
  double reynolds = 1.0;
  double stabilization_beta = 1.0;
  stokes::PreconditionerKind preconditioner = stokes::PreconditionerKind::multigrid;
  unsigned assembly_threads = 1;
};

struct FlowReport {
  double k_m2 = 0.0;
  double k_mD = 0.0;
  double darcy_number = 0.0;
  double flux_in = 0.0;
  double flux_out = 0.0;
  double pressure_in = 0.0;
  double pressure_out = 0.0;
  std::int64_t velocity_dofs = 0;
  std::int64_t pressure_dofs = 0;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;
  double assembly_seconds = 0.0;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
};

struct FlowFields {
  stokes::StokesSystem system;
  stokes::FlowSolution solution;
};

/// Meshes the fluid voxels of `grid`, solves Stokes flow along x and returns the
/// area-averaged permeability with L_c = nx * voxel_edge. Throws PreconditionError
/// for grids without a percolating path and NonConvergenceError from MINRES.
/// When `fields_out` is given, the system and solution are kept for export.
FlowReport solve_flow(const VoxelGrid& grid, const FlowOptions& options = {}, FlowFields* fields_out = nullptr);

// ---------------------------------------------------------------------------
// acquire

struct AcquireOptions {
  Dims dims;
  double voxel_edge = 1.0;  // m
  int size = 100;
  int stride = 50;
  bool rotations = true;
  /// Keep frames without a percolating path as impermeable rows (and write their raw files).
  bool keep_impermeable = false;
};

struct AcquireReport {
  Manifest manifest;
  std::size_t frames = 0;
  std::size_t candidates = 0;  // frames times orientations
  std::size_t impermeable = 0;
};

/// Sample id for frame number `frame` under `rotation`, e.g. "000042-y90".
std::string sample_id(std::size_t frame, Rotation rotation);

/// Cuts `image` into cubic frames, rotates each, prunes disconnected pore space,
/// computes porosity, surface area and f_max, and writes each kept sample to
/// out_dir/samples/<id>.raw plus out_dir/manifest.csv.
AcquireReport acquire(const VoxelGrid& image, const std::string& parent, const std::filesystem::path& out_dir,
                      const AcquireOptions& options);
AcquireReport acquire(const std::filesystem::path& input, const std::filesystem::path& out_dir,
                      const AcquireOptions& options);

// ---------------------------------------------------------------------------
// label

struct LabelOptions {
  FlowOptions flow;
  unsigned workers = 1;
  bool force = false;
  /// When set, one JSON solver report per sample is written here (timings included).
  std::optional<std::filesystem::path> report_dir;
};

struct LabelReport {
  std::size_t labeled = 0;
  std::size_t skipped = 0;
  std::size_t impermeable = 0;
  std::size_t failed = 0;
};

/// Labels every pending (or, with `force`, every) row of the manifest stored at
/// `manifest_path`. Samples are solved independently on `workers` threads; a
/// failure is recorded in its row and does not stop the batch. The manifest is
/// rewritten after each finished sample.
LabelReport label(const std::filesystem::path& manifest_path, const LabelOptions& options,
                  const std::function<void(const SampleRecord&)>& on_done = {});

// ---------------------------------------------------------------------------
// fit

/// Fits k = c f^gamma [D] on labeled rows with f_max > 0 and k_cmp > 0, then
/// writes k_baseline for every row (0 for f_max = 0).
PowerLawFit fit_baseline(Manifest& manifest);

/// "k ≈ c·f^γ [D]" with the fitted constants substituted.
std::string format_fit(const PowerLawFit& fit);

// ---------------------------------------------------------------------------
// stats

struct PredictionStats {
  std::size_t count = 0;
  double r_squared = 0.0;
  double r_squared_log = 0.0;
  double mse = 0.0;
  double mse_log = 0.0;
};

struct DatasetStats {
  std::size_t rows = 0;
  std::optional<stats::Summary> porosity;
  std::optional<stats::Summary> k_cmp;  // mD, labeled permeable rows only
  std::optional<stats::Histogram> porosity_histogram;
  std::optional<stats::Histogram> log_k_histogram;  // log10 mD
  std::optional<PredictionStats> predictions;
};

/// `prediction_column` is "k_prd_mD", "k_baseline_mD" or empty for none.
DatasetStats dataset_stats(const Manifest& manifest, const std::string& prediction_column, std::size_t bins = 10);

PredictionStats compare(std::span<const double> targets, std::span<const double> predictions);

// ---------------------------------------------------------------------------
// distort

struct DistortStep {
  int layers = 0;  // > 0 dilation, < 0 erosion
  double porosity = 0.0;
  std::int64_t f_max = 0;
  std::optional<double> k_mD;
  std::string error;
};

/// Morphology series from -steps to +steps layers. Steps the grid cannot take
/// (more layers than half its smallest extent) are omitted.
std::vector<DistortStep> distort(const VoxelGrid& sample, int steps, const std::optional<FlowOptions>& flow);

// ---------------------------------------------------------------------------
// filter-range

struct SplitReport {
  std::size_t kept = 0;
  std::size_t removed = 0;
  std::size_t train = 0;
  std::size_t validation = 0;
};

/// Keeps labeled rows with k_cmp in the closed range [k_min, k_max] (mD), then
/// marks floor(train_fraction * N) of them "train" and the rest "validation"
/// using a seeded Fisher-Yates shuffle.
SplitReport filter_range(Manifest& manifest, double k_min_mD, double k_max_mD, std::uint64_t seed,
                         double train_fraction = 0.9);

}  // namespace rockperm
