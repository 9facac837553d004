#include "rockperm/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include <json.hpp>

#include "rockperm/errors.hpp"
#include "rockperm/stokes/assembly.hpp"
#include "rockperm/stokes/mesh.hpp"
#include "rockperm/stokes/permeability.hpp"
#include "rockperm/units.hpp"

namespace rockperm {

namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void describe(SampleRecord& r, const VoxelGrid& grid) {
  r.porosity = porosity(grid);
  const auto surface = surface_area(grid);
  r.face_count = static_cast<std::int64_t>(surface.face_count);
  r.area_m2 = surface.area;
  r.specific_area = surface.specific_area;
}

void write_report(const fs::path& dir, const SampleRecord& r, const FlowReport* flow) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["status"] = std::string(to_string(r.status));
  if (!r.error.empty()) j["error"] = r.error;
  if (flow) {
    j["k_mD"] = flow->k_mD;
    j["darcy_number"] = flow->darcy_number;
    j["flux_in"] = flow->flux_in;
    j["flux_out"] = flow->flux_out;
    j["pressure_in"] = flow->pressure_in;
    j["pressure_out"] = flow->pressure_out;
    j["velocity_dofs"] = flow->velocity_dofs;
    j["pressure_dofs"] = flow->pressure_dofs;
    j["iterations"] = flow->iterations;
    j["residual"] = flow->residual;
    j["residual_history"] = flow->residual_history;
    j["timings"] = {{"assembly_s", flow->assembly_seconds},
                    {"setup_s", flow->setup_seconds},
                    {"solve_s", flow->solve_seconds}};
  }
  fs::create_directories(dir);
  std::ofstream out(dir / (r.id + ".json"));
  out << j.dump(2) << '\n';
}

}  // namespace

FlowReport solve_flow(const VoxelGrid& grid, const FlowOptions& options, FlowFields* fields_out) {
  FlowReport report;
  auto start = std::chrono::steady_clock::now();
  const auto mesh = stokes::build_mesh(grid, options.refinement);
  stokes::AssemblyOptions ao;
  ao.reynolds = options.reynolds;
  ao.stabilization_beta = options.stabilization_beta;
  ao.threads = options.assembly_threads;
  auto system = stokes::assemble(mesh, options.order, ao);
  report.assembly_seconds = seconds_since(start);
  report.velocity_dofs = system.n();
  report.pressure_dofs = system.m();

  start = std::chrono::steady_clock::now();
  const stokes::StokesPreconditioner pc(system, options.preconditioner);
  report.setup_seconds = seconds_since(start);

  auto solution = stokes::minres_solve(system, pc, {options.rel_tol, options.max_iterations});
  report.solve_seconds = solution.solve_seconds;
  report.iterations = solution.iterations;
  report.residual = solution.achieved_residual;
  report.residual_history = solution.residual_history;

  const double length = grid.dims().nx * grid.voxel_edge();
  const auto k = stokes::compute_permeability(solution, system, length);
  report.k_m2 = k.k_m2;
  report.k_mD = k.k_millidarcy();
  report.darcy_number = k.darcy_number;
  report.flux_in = k.flux_in;
  report.flux_out = k.flux_out;
  report.pressure_in = k.pressure_in;
  report.pressure_out = k.pressure_out;

  if (fields_out) {
    fields_out->system = std::move(system);
    fields_out->solution = std::move(solution);
  }
  return report;
}

std::string sample_id(std::size_t frame, Rotation rotation) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu-", frame);
  return buf + std::string(to_string(rotation));
}

AcquireReport acquire(const VoxelGrid& image, const std::string& parent, const fs::path& out_dir,
                      const AcquireOptions& options) {
  if (options.size <= 0 || options.stride <= 0) throw ArgumentError("size and stride must be positive");
  AcquireReport report;
  Manifest& m = report.manifest;
  m.voxel_edge = image.voxel_edge();
  m.size = options.size;
  m.stride = options.stride;

  const fs::path sample_dir = out_dir / "samples";
  fs::create_directories(sample_dir);

  const auto origins = frame_origins(image.dims(), options.size, options.stride);
  report.frames = origins.size();
  std::vector<Rotation> orientations{Rotation::none};
  if (options.rotations) orientations = {Rotation::none, Rotation::y90, Rotation::z90};

  for (std::size_t f = 0; f < origins.size(); ++f) {
    const VoxelGrid frame = extract_frame(image, origins[f], options.size);
    for (Rotation rot : orientations) {
      ++report.candidates;
      SampleRecord r;
      r.id = sample_id(f, rot);
      r.parent = parent;
      r.meta = {origins[f], rot, flow_axis_of(rot)};

      const auto pruned = retain_percolating(apply_rotation(frame, rot), Axis::x);
      r.f_max = pruned.permeable ? max_flow(build_graph(pruned.grid, Axis::x)) : 0;
      if (r.f_max == 0) {
        ++report.impermeable;
        if (!options.keep_impermeable) continue;
        r.status = SampleStatus::impermeable;
        r.k_cmp_mD = 0.0;
      }
      describe(r, pruned.grid);
      r.file = "samples/" + r.id + ".raw";
      try {
        save_raw(pruned.grid, out_dir / r.file);
      } catch (const std::exception& e) {
        throw FormatError("sample " + r.id + ": " + e.what());
      }
      m.rows.push_back(std::move(r));
    }
  }
  write_manifest(m, out_dir / "manifest.csv");
  return report;
}

AcquireReport acquire(const fs::path& input, const fs::path& out_dir, const AcquireOptions& options) {
  const VoxelGrid image = load_raw(input, options.dims, options.voxel_edge);
  return acquire(image, input.filename().string(), out_dir, options);
}

LabelReport label(const fs::path& manifest_path, const LabelOptions& options,
                  const std::function<void(const SampleRecord&)>& on_done) {
  Manifest m = read_manifest(manifest_path);
  const fs::path root = manifest_path.parent_path();
  LabelReport report;

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    SampleRecord& r = m.rows[i];
    if (!options.force && (r.status == SampleStatus::labeled || r.status == SampleStatus::impermeable)) {
      ++report.skipped;
      continue;
    }
    if (!r.permeable()) {
      // Never meshed: no percolating path means k = 0 by definition.
      r.status = SampleStatus::impermeable;
      r.k_cmp_mD = 0.0;
      r.iterations.reset();
      r.residual.reset();
      r.error.clear();
      ++report.impermeable;
      continue;
    }
    todo.push_back(i);
  }
  if (report.impermeable > 0) write_manifest(m, manifest_path);

  std::mutex writer;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= todo.size()) return;
      SampleRecord r;
      {
        std::lock_guard lock(writer);
        r = m.rows[todo[t]];
      }
      std::optional<FlowReport> flow;
      try {
        const VoxelGrid grid = load_raw(root / r.file, m.sample_dims(), m.voxel_edge);
        flow = solve_flow(grid, options.flow);
        r.status = SampleStatus::labeled;
        r.k_cmp_mD = flow->k_mD;
        r.iterations = flow->iterations;
        r.residual = flow->residual;
        r.error.clear();
      } catch (const NonConvergenceError& e) {
        r.status = SampleStatus::failed;
        r.k_cmp_mD.reset();
        r.iterations = static_cast<int>(e.residual_history().size()) - 1;
        r.residual = e.residual_history().empty() ? 0.0 : e.residual_history().back();
        r.error = e.what();
      } catch (const std::exception& e) {
        r.status = SampleStatus::failed;
        r.k_cmp_mD.reset();
        r.iterations.reset();
        r.residual.reset();
        r.error = e.what();
      }
      if (options.report_dir) {
        try {
          write_report(*options.report_dir, r, flow ? &*flow : nullptr);
        } catch (const std::exception&) {
          // A report is a diagnostic; it must not turn a labeled sample into a failure.
        }
      }

      std::lock_guard lock(writer);
      m.rows[todo[t]] = r;
      (r.status == SampleStatus::labeled ? report.labeled : report.failed)++;
      write_manifest(m, manifest_path);
      if (on_done) on_done(r);
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(todo.size())));
  if (workers == 1 || todo.size() <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return report;
}

PowerLawFit fit_baseline(Manifest& m) {
  std::vector<FlowPermeabilityPair> pairs;
  for (const auto& r : m.rows)
    if (r.status == SampleStatus::labeled && r.f_max > 0 && r.k_cmp_mD && *r.k_cmp_mD > 0)
      pairs.push_back({static_cast<double>(r.f_max), units::millidarcy_to_darcy(*r.k_cmp_mD)});
  const PowerLawFit fit = fit_power_law(pairs);
  for (auto& r : m.rows) r.k_baseline_mD = units::darcy_to_millidarcy(predict_baseline(static_cast<double>(r.f_max), fit));
  return fit;
}

std::string format_fit(const PowerLawFit& fit) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "k ≈ %.6g·f^%.4f [D]", fit.coefficient, fit.exponent);
  return buf;
}

PredictionStats compare(std::span<const double> targets, std::span<const double> predictions) {
  PredictionStats s;
  s.count = targets.size();
  s.r_squared = stats::r_squared(targets, predictions);
  s.mse = stats::mean_squared_error(targets, predictions);
  const auto lt = stats::log10_of(targets);
  const auto lp = stats::log10_of(predictions);
  s.r_squared_log = stats::r_squared(lt, lp);
  s.mse_log = stats::mean_squared_error(lt, lp);
  return s;
}

DatasetStats dataset_stats(const Manifest& m, const std::string& prediction_column, std::size_t bins) {
  DatasetStats out;
  out.rows = m.rows.size();
  std::vector<double> phi, k;
  for (const auto& r : m.rows) {
    phi.push_back(r.porosity);
    if (r.status == SampleStatus::labeled && r.k_cmp_mD && *r.k_cmp_mD > 0) k.push_back(*r.k_cmp_mD);
  }
  if (phi.size() < 2) throw StatisticsError("statistics need at least two rows, got " + std::to_string(phi.size()));
  out.porosity = stats::summarize(phi);
  out.porosity_histogram = stats::histogram(phi, bins);
  if (k.size() >= 2) {
    out.k_cmp = stats::summarize(k);
    out.log_k_histogram = stats::histogram(stats::log10_of(k), bins);
  }

  if (!prediction_column.empty()) {
    std::optional<double> SampleRecord::*column = nullptr;
    if (prediction_column == "k_prd_mD" || prediction_column == "k_prd")
      column = &SampleRecord::k_prd_mD;
    else if (prediction_column == "k_baseline_mD" || prediction_column == "k_baseline")
      column = &SampleRecord::k_baseline_mD;
    else
      throw ArgumentError("unknown prediction column '" + prediction_column + "'");
    std::vector<double> t, y;
    for (const auto& r : m.rows) {
      const auto& p = r.*column;
      if (r.status == SampleStatus::labeled && r.k_cmp_mD && *r.k_cmp_mD > 0 && p && *p > 0) {
        t.push_back(*r.k_cmp_mD);
        y.push_back(*p);
      }
    }
    if (t.size() < 2) throw StatisticsError("no labeled rows carry " + prediction_column);
    out.predictions = compare(t, y);
  }
  return out;
}

std::vector<DistortStep> distort(const VoxelGrid& sample, int steps, const std::optional<FlowOptions>& flow) {
  if (steps < 0) throw ArgumentError("distortion steps must be non-negative");
  const Dims d = sample.dims();
  const int limit = std::min({d.nx, d.ny, d.nz}) / 2;
  std::vector<DistortStep> series;
  for (int layers = -std::min(steps, limit); layers <= std::min(steps, limit); ++layers) {
    DistortStep s;
    s.layers = layers;
    const auto pruned = retain_percolating(morph(sample, layers), Axis::x);
    s.porosity = porosity(pruned.grid);
    s.f_max = pruned.permeable ? max_flow(build_graph(pruned.grid, Axis::x)) : 0;
    if (flow) {
      if (s.f_max == 0) {
        s.k_mD = 0.0;
      } else {
        try {
          s.k_mD = solve_flow(pruned.grid, *flow).k_mD;
        } catch (const std::exception& e) {
          s.error = e.what();
        }
      }
    }
    series.push_back(std::move(s));
  }
  return series;
}

SplitReport filter_range(Manifest& m, double k_min_mD, double k_max_mD, std::uint64_t seed, double train_fraction) {
  if (!(k_min_mD <= k_max_mD)) throw ArgumentError("k_min must not exceed k_max");
  if (!(train_fraction >= 0 && train_fraction <= 1)) throw ArgumentError("train fraction must lie in [0, 1]");
  SplitReport report;
  std::vector<SampleRecord> kept;
  for (auto& r : m.rows) {
    if (r.status == SampleStatus::labeled && r.k_cmp_mD && *r.k_cmp_mD >= k_min_mD && *r.k_cmp_mD <= k_max_mD)
      kept.push_back(std::move(r));
    else
      ++report.removed;
  }
  m.rows = std::move(kept);
  report.kept = m.rows.size();

  // Fisher-Yates written out so the permutation does not depend on the standard library's distributions.
  std::vector<std::size_t> order(m.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::uint64_t bound = i;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw;
    do draw = rng();
    while (draw >= limit);
    std::swap(order[i - 1], order[draw % bound]);
  }
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(m.rows.size()) + 1e-9));
  for (std::size_t i = 0; i < order.size(); ++i) m.rows[order[i]].split = i < n_train ? "train" : "validation";
  report.train = n_train;
  report.validation = m.rows.size() - n_train;
  return report;
}

}  // namespace rockperm
