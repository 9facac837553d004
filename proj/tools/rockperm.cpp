// rockperm: voxel rock samples to labeled permeability datasets.
//
// Exit status: 0 success, 1 some samples failed to label, 2 usage or input error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rockperm/errors.hpp"
#include "rockperm/manifest.hpp"
#include "rockperm/pipeline.hpp"
#include "rockperm/pore_graph.hpp"
#include "rockperm/stokes/field_export.hpp"
#include "rockperm/voxel_grid.hpp"

namespace fs = std::filesystem;
using namespace rockperm;

namespace {

constexpr int kFailedSamples = 1;
constexpr int kUsage = 2;

Dims parse_dims(const std::vector<int>& v) {
  if (v.size() == 1) return {v[0], v[0], v[0]};
  if (v.size() == 3) return {v[0], v[1], v[2]};
  throw ArgumentError("--dims takes one edge length or nx ny nz");
}

void add_flow_options(CLI::App* cmd, FlowOptions& flow, std::string& preconditioner) {
  cmd->add_option("--order", flow.order, "pressure degree: 0 (Q1/Q0 stabilized) or 1 (Q2/Q1)")
      ->check(CLI::IsMember({0, 1}))
      ->capture_default_str();
  cmd->add_option("--refinement", flow.refinement, "global refinement levels of the voxel mesh")
      ->check(CLI::Range(0, 4))
      ->capture_default_str();
  cmd->add_option("--rel-tol", flow.rel_tol, "MINRES relative tolerance")->capture_default_str();
  cmd->add_option("--max-iterations", flow.max_iterations, "MINRES iteration cap")->capture_default_str();
  cmd->add_option("--reynolds", flow.reynolds, "Reynolds number of the nondimensional problem")->capture_default_str();
  cmd->add_option("--beta", flow.stabilization_beta, "jump stabilization weight for order 0")->capture_default_str();
  cmd->add_option("--preconditioner", preconditioner, "multigrid or jacobi")->capture_default_str();
}

double k_in(double k_mD, const std::string& units) { return units == "D" ? k_mD * 1e-3 : k_mD; }

void print_summary(const char* name, const std::optional<stats::Summary>& s, double scale = 1.0) {
  if (!s) {
    std::printf("%-10s (fewer than two values)\n", name);
    return;
  }
  std::printf("%-10s n=%zu mean=%.6g sigma=%.6g min=%.6g max=%.6g\n", name, s->count, s->mean * scale,
              s->sigma * scale, s->min * scale, s->max * scale);
}

void print_histogram(const char* name, const std::optional<stats::Histogram>& h) {
  if (!h) return;
  std::printf("%s histogram [%.6g, %.6g]:", name, h->lower, h->upper);
  for (auto c : h->counts) std::printf(" %zu", c);
  std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rockperm: permeability datasets from segmented voxel images"};
  app.require_subcommand(1);

  // acquire
  AcquireOptions acq;
  std::string acq_input, acq_out;
  std::vector<int> acq_dims;
  bool no_rotations = false;
  auto* cmd_acquire = app.add_subcommand("acquire", "cut, rotate, prune and screen subsamples of a raw image");
  cmd_acquire->add_option("--input", acq_input, "1-bit raw image (1 = fluid)")->required();
  cmd_acquire->add_option("--dims", acq_dims, "image extent: n or nx ny nz")->required()->expected(1, 3);
  cmd_acquire->add_option("--voxel-edge", acq.voxel_edge, "voxel edge length in m")->capture_default_str();
  cmd_acquire->add_option("--size", acq.size, "subsample edge in voxels")->capture_default_str();
  cmd_acquire->add_option("--stride", acq.stride, "frame stride in voxels")->capture_default_str();
  cmd_acquire->add_option("--out", acq_out, "output directory")->required();
  cmd_acquire->add_flag("--no-rotations", no_rotations, "analyze along x only");
  cmd_acquire->add_flag("--keep-impermeable", acq.keep_impermeable, "keep rows for frames with f_max = 0");

  // label
  LabelOptions lab;
  std::string lab_manifest, lab_pc = "multigrid", lab_reports;
  auto* cmd_label = app.add_subcommand("label", "solve Stokes flow for every pending sample");
  cmd_label->add_option("--manifest", lab_manifest)->required();
  add_flow_options(cmd_label, lab.flow, lab_pc);
  cmd_label->add_option("--workers", lab.workers, "samples solved concurrently")->capture_default_str();
  cmd_label->add_flag("--force", lab.force, "relabel rows that already carry a result");
  cmd_label->add_option("--reports", lab_reports, "directory for per-sample JSON solver reports");

  // fit
  std::string fit_manifest;
  bool fit_dry = false;
  auto* cmd_fit = app.add_subcommand("fit", "fit k = c f^gamma and write k_baseline");
  cmd_fit->add_option("--manifest", fit_manifest)->required();
  cmd_fit->add_flag("--dry-run", fit_dry, "print the fit without rewriting the manifest");

  // stats
  std::string st_manifest, st_pred, st_units = "mD";
  std::size_t st_bins = 10;
  auto* cmd_stats = app.add_subcommand("stats", "dataset statistics and prediction metrics");
  cmd_stats->add_option("--manifest", st_manifest)->required();
  cmd_stats->add_option("--predictions", st_pred, "k_prd_mD or k_baseline_mD");
  cmd_stats->add_option("--bins", st_bins)->capture_default_str();
  cmd_stats->add_option("--units", st_units, "mD or D")->check(CLI::IsMember({"mD", "D"}))->capture_default_str();

  // distort
  std::string dis_sample, dis_pc = "multigrid";
  std::vector<int> dis_dims;
  double dis_edge = 2.25e-6;
  int dis_steps = 5;
  bool dis_flow = false;
  FlowOptions dis_opts;
  auto* cmd_distort = app.add_subcommand("distort", "erosion/dilation series of one sample");
  cmd_distort->add_option("--sample", dis_sample, "1-bit raw sample")->required();
  cmd_distort->add_option("--dims", dis_dims, "sample extent: n or nx ny nz")->required()->expected(1, 3);
  cmd_distort->add_option("--voxel-edge", dis_edge)->capture_default_str();
  cmd_distort->add_option("--steps", dis_steps, "layers removed and added")->capture_default_str();
  cmd_distort->add_flag("--flow", dis_flow, "also compute k_cmp for each step");
  add_flow_options(cmd_distort, dis_opts, dis_pc);

  // filter-range
  std::string fr_manifest, fr_out;
  double fr_min = 50.0, fr_max = 50000.0, fr_fraction = 0.9;
  std::uint64_t fr_seed = 0;
  auto* cmd_filter = app.add_subcommand("filter-range", "keep k_cmp in [k-min, k-max] and split train/validation");
  cmd_filter->add_option("--manifest", fr_manifest)->required();
  cmd_filter->add_option("--k-min", fr_min, "lower bound in mD (kept)")->capture_default_str();
  cmd_filter->add_option("--k-max", fr_max, "upper bound in mD (kept)")->capture_default_str();
  cmd_filter->add_option("--seed", fr_seed)->capture_default_str();
  cmd_filter->add_option("--train-fraction", fr_fraction)->capture_default_str();
  cmd_filter->add_option("--out", fr_out, "output manifest (default: overwrite input)");

  // export
  std::string ex_manifest, ex_id, ex_edges, ex_slices, ex_vtk, ex_pc = "multigrid";
  FlowOptions ex_opts;
  auto* cmd_export = app.add_subcommand("export", "graph, slice or flow-field files for one sample");
  cmd_export->add_option("--manifest", ex_manifest)->required();
  cmd_export->add_option("--id", ex_id)->required();
  cmd_export->add_option("--edges", ex_edges, "pore graph edge list");
  cmd_export->add_option("--slices", ex_slices, "ASCII voxel slices");
  cmd_export->add_option("--vtk", ex_vtk, "velocity and pressure as legacy VTK");
  add_flow_options(cmd_export, ex_opts, ex_pc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*cmd_acquire) {
      acq.dims = parse_dims(acq_dims);
      acq.rotations = !no_rotations;
      const auto r = acquire(fs::path(acq_input), fs::path(acq_out), acq);
      std::printf("frames %zu, candidates %zu, impermeable %zu, kept %zu\n", r.frames, r.candidates, r.impermeable,
                  r.manifest.rows.size());
      return 0;
    }

    if (*cmd_label) {
      lab.flow.preconditioner = stokes::parse_preconditioner(lab_pc);
      if (!lab_reports.empty()) lab.report_dir = fs::path(lab_reports);
      const auto r = label(fs::path(lab_manifest), lab, [](const SampleRecord& s) {
        if (s.status == SampleStatus::labeled)
          std::printf("%s k=%.6g mD it=%d\n", s.id.c_str(), *s.k_cmp_mD, *s.iterations);
        else
          std::fprintf(stderr, "%s failed: %s\n", s.id.c_str(), s.error.c_str());
        std::fflush(stdout);
      });
      std::printf("labeled %zu, impermeable %zu, skipped %zu, failed %zu\n", r.labeled, r.impermeable, r.skipped,
                  r.failed);
      return r.failed > 0 ? kFailedSamples : 0;
    }

    if (*cmd_fit) {
      Manifest m = read_manifest(fs::path(fit_manifest));
      const auto fit = fit_baseline(m);
      std::printf("%s\nc=%.10g gamma=%.10g R2_log=%.10g\n", format_fit(fit).c_str(), fit.coefficient, fit.exponent,
                  fit.r_squared_log);
      if (!fit_dry) write_manifest(m, fs::path(fit_manifest));
      return 0;
    }

    if (*cmd_stats) {
      const Manifest m = read_manifest(fs::path(st_manifest));
      const auto s = dataset_stats(m, st_pred, st_bins);
      const double scale = k_in(1.0, st_units);
      std::printf("rows %zu\n", s.rows);
      print_summary("porosity", s.porosity);
      print_summary(st_units == "D" ? "k_cmp[D]" : "k_cmp[mD]", s.k_cmp, scale);
      print_histogram("porosity", s.porosity_histogram);
      print_histogram("log10 k_cmp[mD]", s.log_k_histogram);
      if (s.predictions) {
        const auto& p = *s.predictions;
        std::printf("predictions %s n=%zu\n", st_pred.c_str(), p.count);
        std::printf("R2 %.6f R2_log %.6f\n", p.r_squared, p.r_squared_log);
        std::printf("MSE %.6g [mD^2] MSE_log %.6g\n", p.mse, p.mse_log);
      }
      return 0;
    }

    if (*cmd_distort) {
      dis_opts.preconditioner = stokes::parse_preconditioner(dis_pc);
      const VoxelGrid g = load_raw(fs::path(dis_sample), parse_dims(dis_dims), dis_edge);
      const auto series = distort(g, dis_steps, dis_flow ? std::optional<FlowOptions>(dis_opts) : std::nullopt);
      std::printf("layers,porosity,f_max,k_cmp_mD\n");
      for (const auto& s : series) {
        std::printf("%d,%.6f,%lld,", s.layers, s.porosity, static_cast<long long>(s.f_max));
        if (s.k_mD) std::printf("%.6g", *s.k_mD);
        std::printf("\n");
        if (!s.error.empty()) std::fprintf(stderr, "step %d: %s\n", s.layers, s.error.c_str());
      }
      return 0;
    }

    if (*cmd_filter) {
      const fs::path in_path(fr_manifest);
      const fs::path out_path = fr_out.empty() ? in_path : fs::path(fr_out);
      Manifest m = read_manifest(in_path);
      const auto r = filter_range(m, fr_min, fr_max, fr_seed, fr_fraction);
      const fs::path in_root = fs::absolute(in_path).parent_path();
      const fs::path out_root = fs::absolute(out_path).parent_path();
      if (in_root != out_root)
        for (auto& row : m.rows) row.file = fs::relative(in_root / row.file, out_root).generic_string();
      write_manifest(m, out_path);
      if (r.kept == 0) std::fprintf(stderr, "warning: no rows inside [%g, %g] mD\n", fr_min, fr_max);
      std::printf("kept %zu, removed %zu, train %zu, validation %zu\n", r.kept, r.removed, r.train, r.validation);
      return 0;
    }

    if (*cmd_export) {
      const fs::path mpath(ex_manifest);
      const Manifest m = read_manifest(mpath);
      const SampleRecord* row = m.find(ex_id);
      if (!row) throw ArgumentError("no sample '" + ex_id + "' in " + ex_manifest);
      const VoxelGrid g = load_raw(mpath.parent_path() / row->file, m.sample_dims(), m.voxel_edge);
      if (!ex_edges.empty()) {
        std::ofstream out(ex_edges);
        write_edge_list(build_graph(g, Axis::x), out);
      }
      if (!ex_slices.empty()) {
        std::ofstream out(ex_slices);
        write_ascii_slices(g, out);
      }
      if (!ex_vtk.empty()) {
        ex_opts.preconditioner = stokes::parse_preconditioner(ex_pc);
        FlowFields fields;
        const auto rep = solve_flow(g, ex_opts, &fields);
        std::ofstream out(ex_vtk);
        stokes::write_vtk(out, fields.system, fields.solution);
        std::printf("k=%.6g mD it=%d\n", rep.k_mD, rep.iterations);
      }
      return 0;
    }
  } catch (const NonConvergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailedSamples;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return 0;
}
