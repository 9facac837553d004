#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "../support.hpp"
#include "rockperm/errors.hpp"
#include "rockperm/pore_graph.hpp"

using namespace rockperm;
using rockperm::testing::random_grid;

namespace {

// Minimum s-t cut by enumerating every source side of the vertex partition.
std::int64_t brute_force_min_cut(const PoreGraph& g) {
  const int free_nodes = g.node_count - 2;
  std::int64_t best = static_cast<std::int64_t>(g.edges.size());
  for (std::uint32_t mask = 0; mask < (1u << free_nodes); ++mask) {
    auto source_side = [&](std::int32_t v) {
      if (v == PoreGraph::source) return true;
      if (v == PoreGraph::sink) return false;
      return ((mask >> (v - 2)) & 1u) != 0;
    };
    std::int64_t cut = 0;
    for (const auto& e : g.edges) cut += source_side(e.u) != source_side(e.v);
    best = std::min(best, cut);
  }
  return best;
}

bool connected_without(const PoreGraph& g, const std::vector<GraphEdge>& removed) {
  std::set<std::pair<int, int>> cut;
  for (const auto& e : removed) cut.insert({std::min(e.u, e.v), std::max(e.u, e.v)});
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.node_count));
  for (const auto& e : g.edges) {
    if (cut.count({std::min(e.u, e.v), std::max(e.u, e.v)})) continue;
    adj[static_cast<std::size_t>(e.u)].push_back(e.v);
    adj[static_cast<std::size_t>(e.v)].push_back(e.u);
  }
  std::vector<char> seen(adj.size(), 0);
  std::vector<int> stack{PoreGraph::source};
  seen[PoreGraph::source] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj[static_cast<std::size_t>(v)])
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        stack.push_back(w);
      }
  }
  return seen[PoreGraph::sink];
}

}  // namespace

TEST_CASE("graph construction") {
  const auto g = grid_from_rows({"110", "011"});
  const auto pg = build_graph(g, Axis::x);
  CHECK(pg.node_count == 2 + 4);
  // 3 voxel adjacencies, 1 source edge (x = 0), 1 sink edge (x = 2)
  CHECK(pg.edges.size() == 5);
  CHECK(pg.voxel_of_node[2] == 0);

  std::ostringstream out;
  write_edge_list(pg, out);
  CHECK(out.str().rfind("# nodes 6 source 0 sink 1\n", 0) == 0);
}

TEST_CASE("parallel ducts carry one unit each") {
  VoxelGrid g({6, 5, 5}, 1.0);
  for (int x = 0; x < 6; ++x) {
    g.set(x, 0, 0, true);
    g.set(x, 2, 0, true);
    g.set(x, 4, 3, true);
  }
  CHECK(max_flow(build_graph(g, Axis::x)) == 3);
  CHECK(max_flow(build_graph(g, Axis::y)) == 0);

  VoxelGrid empty({3, 3, 3}, 1.0);
  CHECK(max_flow(build_graph(empty)) == 0);
  VoxelGrid full({3, 3, 3}, 1.0);
  full.fill(true);
  CHECK(max_flow(build_graph(full)) == 9);
}

TEST_CASE("a one-voxel wide domain along the flow axis") {
  VoxelGrid g({1, 2, 2}, 1.0);
  g.fill(true);
  // Each voxel touches both faces: source and sink edges meet at the same node.
  CHECK(max_flow(build_graph(g)) == 4);
}

TEST_CASE("max flow equals a brute-force min cut on small random grids") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Dims d{3, 2, 2};
    const auto g = random_grid(d, 0.65, seed);
    const auto pg = build_graph(g, static_cast<Axis>(seed % 3));
    const auto res = max_flow_min_cut(pg);
    CHECK(res.value == brute_force_min_cut(pg));
    CHECK(static_cast<std::int64_t>(res.cut.size()) == res.value);
    if (res.value > 0) CHECK_FALSE(connected_without(pg, res.cut));
  }
}

TEST_CASE("the two-dimensional fixtures") {
  const auto small = grid_from_rows({"1100", "1100", "0111", "0001"});
  CHECK(small.fluid_count() == 8);
  CHECK(porosity(small) == 0.5);
  CHECK(max_flow(build_graph(small, Axis::x)) == 1);

  const auto large = grid_from_rows({
      "00000000",
      "11111111",
      "00100100",
      "11111111",
      "00000000",
      "11111111",
      "01000010",
      "01100010",
  });
  CHECK(max_flow(build_graph(large, Axis::x)) == 3);
  CHECK(max_flow(build_graph(large, Axis::y)) == 0);
  CHECK(min_cut(build_graph(large, Axis::x)).size() == 3);
}

TEST_CASE("power-law fit") {
  SUBCASE("planted constants are recovered") {
    std::vector<FlowPermeabilityPair> pairs;
    for (double f : {1.0, 3.0, 10.0, 40.0, 200.0}) pairs.push_back({f, 0.02 * std::pow(f, 1.3)});
    const auto fit = fit_power_law(pairs);
    CHECK(fit.coefficient == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(fit.exponent == doctest::Approx(1.3).epsilon(1e-12));
    CHECK(fit.r_squared_log == doctest::Approx(1.0));
  }
  SUBCASE("bad input") {
    std::vector<FlowPermeabilityPair> one{{2.0, 1.0}};
    CHECK_THROWS_AS(fit_power_law(one), FitError);
    std::vector<FlowPermeabilityPair> zero{{0.0, 1.0}, {2.0, 1.0}};
    CHECK_THROWS_AS(fit_power_law(zero), FitError);
    std::vector<FlowPermeabilityPair> same{{2.0, 1.0}, {2.0, 3.0}};
    CHECK_THROWS_AS(fit_power_law(same), FitError);
  }
  SUBCASE("baseline prediction") {
    const auto b = bentheimer_fit();
    CHECK(b.coefficient == doctest::Approx(50625.0 * std::pow(10.0, -8.183)));
    CHECK(b.exponent == 1.407);
    CHECK(predict_baseline(0.0, b) == 0.0);
    CHECK(predict_baseline(100.0, b) == doctest::Approx(b.coefficient * std::pow(100.0, 1.407)));
    CHECK_THROWS_AS(predict_baseline(-1.0, b), ArgumentError);
  }
}
