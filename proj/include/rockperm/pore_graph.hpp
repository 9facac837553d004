#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "rockperm/voxel_grid.hpp"

namespace rockperm {

struct GraphEdge {
  std::int32_t u = 0;
  std::int32_t v = 0;
  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

/// Unit-capacity undirected graph of the pore space. Node 0 is the inflow
/// super-node, node 1 the outflow super-node, fluid voxels follow in linear order.
struct PoreGraph {
  static constexpr std::int32_t source = 0;
  static constexpr std::int32_t sink = 1;

  std::int32_t node_count = 2;
  std::vector<GraphEdge> edges;
  Axis axis = Axis::x;
  /// voxel_of_node[k] = linear voxel index of node k (k >= 2); entries 0 and 1 are unused.
  std::vector<std::size_t> voxel_of_node;
};

PoreGraph build_graph(const VoxelGrid& grid, Axis axis = Axis::x);

/// Exact maximum s-t flow (Dinic) with capacity one on every edge.
std::int64_t max_flow(const PoreGraph& graph);

struct MaxFlowResult {
  std::int64_t value = 0;
  /// Edges crossing from the residual-reachable source side to the rest.
  std::vector<GraphEdge> cut;
};

MaxFlowResult max_flow_min_cut(const PoreGraph& graph);

std::vector<GraphEdge> min_cut(const PoreGraph& graph);

/// "u v" per line, super-nodes included, for cross-checking with external tools.
void write_edge_list(const PoreGraph& graph, std::ostream& out);

/// k ~ coefficient * f^exponent, fitted in log10-log10 space.
struct PowerLawFit {
  double coefficient = 0.0;
  double exponent = 0.0;
  double r_squared_log = 0.0;
};

/// Reference constants reported for the Bentheimer sandstone data set (k in darcy).
PowerLawFit bentheimer_fit();

struct FlowPermeabilityPair {
  double f_max = 0.0;
  double k = 0.0;
};

PowerLawFit fit_power_law(std::span<const FlowPermeabilityPair> pairs);

double predict_baseline(double f_max, const PowerLawFit& fit);

}  // namespace rockperm
