// Acceptance checks. Prints one PASS/FAIL line per criterion, with indented
// detail lines above it; the exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "support.hpp"
#include "rockperm/pipeline.hpp"
#include "rockperm/pore_graph.hpp"
#include "rockperm/stats.hpp"
#include "rockperm/stokes/assembly.hpp"
#include "rockperm/stokes/mesh.hpp"
#include "rockperm/stokes/permeability.hpp"

using namespace rockperm;
using rockperm::testing::TempDir;

namespace {

class Criterion {
 public:
  explicit Criterion(std::string name) : name_(std::move(name)) {}

  void check(bool ok, const std::string& what) {
    std::printf("  [%s] %s\n", ok ? "ok" : "!!", what.c_str());
    pass_ = pass_ && ok;
  }
  void note(const std::string& what) { std::printf("  %s\n", what.c_str()); }

  bool finish() const {
    std::printf("%s %s\n\n", pass_ ? "PASS" : "FAIL", name_.c_str());
    std::fflush(stdout);
    return pass_;
  }

 private:
  std::string name_;
  bool pass_ = true;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 6x3 voxel channel centred in a 100^3 unit cube of 2.25 um voxels.
VoxelGrid channel_6x3() {
  VoxelGrid g({100, 100, 100}, 2.25e-6);
  for (int z = 48; z < 51; ++z)
    for (int y = 47; y < 53; ++y)
      for (int x = 0; x < 100; ++x) g.set(x, y, z, true);
  return g;
}

// ---------------------------------------------------------------------------

bool channel_benchmark() {
  Criterion c("6x3 channel benchmark: errors within 25% of the published values, DOF counts exact");
  struct Row {
    int order, level;
    double error;
    std::int64_t n, m;
  };
  const Row rows[] = {
      {0, 0, 8.82e-2, 8484, 1800},    {0, 1, 2.22e-2, 54873, 14400},  {0, 2, 4.62e-3, 390975, 115200},
      {1, 0, 1.20e-3, 54873, 2828},   {1, 1, 4.06e-4, 390975, 18291},
  };
  const VoxelGrid g = channel_6x3();
  const double k_ana = stokes::analytic_channel_permeability(0.06, 0.03, 10);
  c.note(fmt("k_ana = %.7e", k_ana));
  for (const auto& r : rows) {
    FlowOptions opt;
    opt.order = r.order;
    opt.refinement = r.level;
    const auto rep = solve_flow(g, opt);
    const double err = std::abs(rep.darcy_number - k_ana) / k_ana;
    c.check(rep.velocity_dofs == r.n && rep.pressure_dofs == r.m,
            fmt("order %d level %d: n = %lld, m = %lld (expected %lld, %lld)", r.order, r.level,
                static_cast<long long>(rep.velocity_dofs), static_cast<long long>(rep.pressure_dofs),
                static_cast<long long>(r.n), static_cast<long long>(r.m)));
    c.check(std::abs(err - r.error) <= 0.25 * r.error,
            fmt("order %d level %d: k_cmp = %.4e, error %.3e vs %.3e (ratio %.2f), %d iterations, %.1f s", r.order,
                r.level, rep.darcy_number, err, r.error, err / r.error, rep.iterations,
                rep.assembly_seconds + rep.setup_seconds + rep.solve_seconds));
  }
  return c.finish();
}

bool series_bound() {
  Criterion c("duct series truncation bound and parallel-plate limit");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> side(0.01, 0.5);
  std::vector<std::pair<double, double>> pairs{{0.06, 0.03}};
  for (int i = 0; i < 20; ++i) pairs.emplace_back(side(rng), side(rng));
  int violations = 0;
  double worst = 0.0;
  for (auto [a, b] : pairs) {
    const double k200 = stokes::channel_series(a, b, 200);
    for (int j : {1, 5, 10}) {
      const double gap = std::abs(stokes::channel_series(a, b, j) - k200);
      const double bound = 0.0049 * std::pow(j, -4.0);
      violations += gap > bound;
      worst = std::max(worst, gap / bound);
    }
  }
  c.check(violations == 0, fmt("21 pairs x j in {1,5,10}: %d violations, largest gap/bound %.3f", violations, worst));

  const double wide = 0.4, thin = wide * 1e-3;
  const double plates = std::pow(thin, 3) * wide / 12.0;
  const double k = stokes::analytic_channel_permeability(thin, wide);
  c.check(std::abs(k - plates) <= 1e-3 * plates, fmt("min/max = 1e-3: k_ana / (min^3 max / 12) = %.6f", k / plates));
  return c.finish();
}

// Minimum s-t edge cut by enumerating every vertex bipartition.
std::int64_t brute_force_min_cut(const PoreGraph& g) {
  const int free_nodes = g.node_count - 2;
  std::int64_t best = static_cast<std::int64_t>(g.edges.size());
  for (std::uint32_t mask = 0; mask < (1u << free_nodes); ++mask) {
    std::int64_t cut = 0;
    for (const auto& e : g.edges) {
      auto side = [&](std::int32_t v) {
        return v == PoreGraph::source || (v != PoreGraph::sink && ((mask >> (v - 2)) & 1u));
      };
      cut += side(e.u) != side(e.v);
    }
    best = std::min(best, cut);
  }
  return best;
}

bool max_flow_oracle() {
  Criterion c("max flow equals a brute-force min cut; two-dimensional fixtures");
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> extent(1, 5);
  std::uniform_real_distribution<double> fraction(0.2, 0.9);
  int mismatches = 0, positive = 0;
  for (int t = 0; t < 200; ++t) {
    const Dims d{extent(rng), extent(rng), extent(rng)};
    auto g = rockperm::testing::random_grid(d, fraction(rng), rng());
    // Keep the exhaustive search tractable: at most 16 fluid voxels.
    std::vector<std::size_t> fluid;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g.fluid(i)) fluid.push_back(i);
    std::shuffle(fluid.begin(), fluid.end(), rng);
    for (std::size_t i = 16; i < fluid.size(); ++i) g.set(fluid[i], false);
    const auto pg = build_graph(g, static_cast<Axis>(t % 3));
    const auto f = max_flow(pg);
    positive += f > 0;
    mismatches += f != brute_force_min_cut(pg);
  }
  c.check(mismatches == 0, fmt("200 random grids up to 5x5x5: %d mismatches, %d with positive flow", mismatches, positive));

  const auto left = grid_from_rows({"1100", "1100", "0111", "0001"});
  const auto right = grid_from_rows(
      {"00000000", "11111111", "00100100", "11111111", "00000000", "11111111", "01000010", "01100010"});
  const auto fl = max_flow(build_graph(left, Axis::x));
  const auto fh = max_flow(build_graph(right, Axis::x));
  const auto fv = max_flow(build_graph(right, Axis::y));
  c.check(fl == 1, fmt("4x4 fixture: f_max = %lld", static_cast<long long>(fl)));
  c.check(fh == 3 && fv == 0,
          fmt("8x8 fixture: f_max = %lld horizontal, %lld vertical", static_cast<long long>(fh),
              static_cast<long long>(fv)));
  return c.finish();
}

bool physics_invariants() {
  Criterion c("mass balance, Reynolds invariance and saddle-point inertia");
  const auto duct = rockperm::testing::duct({12, 6, 6}, 1, 3, 2, 2, 1e-6);
  const auto porous = retain_percolating(rockperm::testing::random_grid({10, 10, 10}, 0.7, 21, 1e-6)).grid;
  const auto channel = channel_6x3();
  for (const auto* g : {&duct, &channel, &porous}) {
    FlowOptions opt;
    const auto r = solve_flow(*g, opt);
    const double imbalance = std::abs(r.flux_in + r.flux_out) / std::abs(r.flux_out);
    c.check(imbalance <= 1e-5, fmt("order 1, %zu fluid voxels: |Q_in + Q_out| / |Q| = %.2e", g->fluid_count(), imbalance));

    FlowOptions re10 = opt;
    re10.reynolds = 10.0;
    const auto r10 = solve_flow(*g, re10);
    const double drift = std::abs(r10.k_m2 - r.k_m2) / r.k_m2;
    c.check(drift <= 1e-6, fmt("Re = 1 vs 10: relative change in k %.2e", drift));
  }

  for (int order : {0, 1}) {
    const auto g = rockperm::testing::duct({5, 3, 3}, 0, 3, 1, 2);  // 30 cells
    const auto sys = stokes::assemble(stokes::build_mesh(g, 0), order);
    const Eigen::MatrixXd s = Eigen::MatrixXd(sys.saddle_matrix());
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s, Eigen::EigenvaluesOnly).eigenvalues();
    const double tiny = 1e-10 * ev.cwiseAbs().maxCoeff();
    const auto pos = (ev.array() > tiny).count(), neg = (ev.array() < -tiny).count();
    c.check(pos == sys.n() && neg == sys.m() && pos + neg == ev.size(),
            fmt("order %d, 30 cells: %lld positive (n = %lld), %lld negative (m = %lld)", order,
                static_cast<long long>(pos), static_cast<long long>(sys.n()), static_cast<long long>(neg),
                static_cast<long long>(sys.m())));
  }
  return c.finish();
}

// Independent percolation test: breadth-first search from the x = 0 face.
bool spans_x(const VoxelGrid& g) {
  const Dims d = g.dims();
  std::vector<char> seen(g.size(), 0);
  std::queue<std::array<int, 3>> q;
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      if (g.fluid(0, y, z)) {
        seen[g.index(0, y, z)] = 1;
        q.push({0, y, z});
      }
  while (!q.empty()) {
    const auto [x, y, z] = q.front();
    q.pop();
    if (x == d.nx - 1) return true;
    const int step[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    for (const auto& s : step) {
      const int a = x + s[0], b = y + s[1], e = z + s[2];
      if (!g.fluid_or_solid(a, b, e) || seen[g.index(a, b, e)]) continue;
      seen[g.index(a, b, e)] = 1;
      q.push({a, b, e});
    }
  }
  return false;
}

bool pipeline_counts() {
  Criterion c("frame counts, rotation tripling, impermeable screening");
  c.check(frame_origins({1000, 1000, 1000}, 100, 50).size() == 6859, "1000^3, size 100, stride 50: 19^3 = 6859 frames");

  TempDir dir("acceptance-counts");
  AcquireOptions opt;
  opt.size = 100;
  opt.stride = 50;
  opt.rotations = false;
  const VoxelGrid solid({300, 300, 300}, 1e-6);
  const auto plain = acquire(solid, "solid.raw", dir.path() / "plain", opt);
  opt.rotations = true;
  const auto turned = acquire(solid, "solid.raw", dir.path() / "turned", opt);
  c.check(plain.frames == 125 && plain.candidates == 125,
          fmt("300^3 without rotations: %zu frames, %zu candidates (5^3 = 125)", plain.frames, plain.candidates));
  c.check(turned.candidates == 375, fmt("300^3 with rotations: %zu candidates (3 * 125)", turned.candidates));

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> fraction(0.2, 0.6);
  int disagreements = 0, kept = 0, checked = 0;
  AcquireOptions small;
  small.size = 8;
  small.stride = 8;
  for (int t = 0; t < 100; ++t) {
    const auto g = rockperm::testing::random_grid({8, 8, 8}, fraction(rng), rng(), 1e-6);
    const auto rep = acquire(g, "fixture.raw", dir.path() / ("f" + std::to_string(t)), small);
    for (Rotation rot : {Rotation::none, Rotation::y90, Rotation::z90}) {
      ++checked;
      const bool spans = spans_x(apply_rotation(g, rot));
      const auto* row = rep.manifest.find(sample_id(0, rot));
      disagreements += spans != (row != nullptr);
      if (row) {
        ++kept;
        disagreements += row->f_max <= 0;
      }
    }
    std::filesystem::remove_all(dir.path() / ("f" + std::to_string(t)));
  }
  c.check(disagreements == 0,
          fmt("100 random 8^3 fixtures, %d orientations: %d kept, %d disagreements with a BFS percolation test", checked,
              kept, disagreements));
  return c.finish();
}

bool regression_recovery() {
  Criterion c("power-law regression recovers planted constants");
  const double c0 = 50625.0 * std::pow(10.0, -8.183), g0 = 1.407;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> log_f(0.0, std::log10(3000.0));
  std::normal_distribution<double> noise(0.0, 0.1);
  std::vector<FlowPermeabilityPair> exact, noisy;
  for (int i = 0; i < 200; ++i) {
    const double f = std::round(std::pow(10.0, log_f(rng))) + 1.0;
    const double k = c0 * std::pow(f, g0);
    exact.push_back({f, k});
    noisy.push_back({f, k * std::exp(noise(rng))});
  }
  const auto a = fit_power_law(exact);
  c.check(std::abs(a.coefficient / c0 - 1) < 1e-10 && std::abs(a.exponent - g0) < 1e-10,
          fmt("noise-free: c = %.10e (planted %.10e), gamma = %.10f", a.coefficient, c0, a.exponent));
  const auto b = fit_power_law(noisy);
  c.check(std::abs(b.exponent - g0) <= 0.05,
          fmt("sigma = 0.1 log-normal noise, 200 points: gamma = %.4f, c = %.4e, R^2_log = %.4f", b.exponent,
              b.coefficient, b.r_squared_log));
  return c.finish();
}

bool metrics() {
  Criterion c("sigma, R^2 and MSE on three-element vectors");
  const std::vector<double> t{1, 2, 3}, y{1, 2, 4};
  const double r2 = stats::r_squared(t, y), mse = stats::mean_squared_error(t, y), sd = stats::standard_deviation(t);
  c.check(std::abs(r2 - 0.5) <= 1e-12, fmt("R^2 = %.17g", r2));
  c.check(std::abs(mse - 1.0 / 3.0) <= 1e-12, fmt("MSE = %.17g", mse));
  c.check(std::abs(sd - 1.0) <= 1e-12, fmt("sigma = %.17g", sd));
  const auto p = compare(t, y);
  c.check(p.r_squared == r2 && p.mse == mse, "pipeline comparison agrees");
  return c.finish();
}

bool determinism() {
  Criterion c("acquire, label and fit are byte-identical across runs");
  TempDir dir("acceptance-determinism");
  AcquireOptions acq;
  acq.size = 10;
  acq.stride = 10;
  std::vector<std::string> manifests;
  for (unsigned workers : {1u, 2u}) {
    const auto out = dir.path() / ("run" + std::to_string(workers));
    for (int i = 0; i < 3; ++i) {
      const auto image = rockperm::testing::random_grid({20, 10, 10}, 0.62 + 0.04 * i, 40 + i, 1e-6);
      const auto part = out / ("image" + std::to_string(i));
      acquire(image, "image" + std::to_string(i) + ".raw", part, acq);
      LabelOptions lab;
      lab.workers = workers;
      const auto rep = label(part / "manifest.csv", lab);
      auto m = read_manifest(part / "manifest.csv");
      if (i == 2) {
        // Fit over the union of all three corpora.
        Manifest all = m;
        all.rows.clear();
        for (int j = 0; j < 3; ++j)
          for (auto r : read_manifest(out / ("image" + std::to_string(j)) / "manifest.csv").rows) {
            r.file = "image" + std::to_string(j) + "/" + r.file;
            all.rows.push_back(r);
          }
        const auto fit = fit_baseline(all);
        write_manifest(all, out / "manifest.csv");
        c.note(fmt("workers %u: %zu rows, %s", workers, all.rows.size(), format_fit(fit).c_str()));
      }
      c.check(rep.failed == 0, fmt("workers %u, image %d: %zu labeled, %zu failed", workers, i, rep.labeled, rep.failed));
    }
    std::string all_bytes = slurp(out / "manifest.csv");
    for (const auto& e : std::filesystem::recursive_directory_iterator(out))
      if (e.path().extension() == ".raw") all_bytes += slurp(e.path());
    manifests.push_back(all_bytes);
  }
  c.check(!manifests[0].empty() && manifests[0] == manifests[1],
          fmt("manifest plus sample files, %zu bytes, identical for 1 and 2 workers", manifests[0].size()));
  return c.finish();
}

}  // namespace

int main() {
  const std::vector<std::function<bool()>> criteria{channel_benchmark, series_bound, max_flow_oracle, physics_invariants,
                                                    pipeline_counts, regression_recovery, metrics, determinism};
  int failed = 0;
  for (const auto& run : criteria) {
    try {
      failed += !run();
    } catch (const std::exception& e) {
      std::printf("  unexpected exception: %s\nFAIL\n\n", e.what());
      ++failed;
    }
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
