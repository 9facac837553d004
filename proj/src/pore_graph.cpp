#include "rockperm/pore_graph.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "rockperm/errors.hpp"

namespace rockperm {

PoreGraph build_graph(const VoxelGrid& grid, Axis axis) {
  const Dims& d = grid.dims();
  PoreGraph g;
  g.axis = axis;

  std::vector<std::int32_t> node_of_voxel(grid.size(), -1);
  g.voxel_of_node.assign(2, 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.fluid(i)) continue;
    node_of_voxel[i] = g.node_count++;
    g.voxel_of_node.push_back(i);
  }

  const int n_axis = d[axis];
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x) {
        const std::size_t i = grid.index(x, y, z);
        const std::int32_t node = node_of_voxel[i];
        if (node < 0) continue;
        if (x + 1 < d.nx && node_of_voxel[i + 1] >= 0) g.edges.push_back({node, node_of_voxel[i + 1]});
        if (y + 1 < d.ny) {
          const std::int32_t nb = node_of_voxel[grid.index(x, y + 1, z)];
          if (nb >= 0) g.edges.push_back({node, nb});
        }
        if (z + 1 < d.nz) {
          const std::int32_t nb = node_of_voxel[grid.index(x, y, z + 1)];
          if (nb >= 0) g.edges.push_back({node, nb});
        }
        const int c = axis == Axis::x ? x : (axis == Axis::y ? y : z);
        if (c == 0) g.edges.push_back({PoreGraph::source, node});
        if (c == n_axis - 1) g.edges.push_back({node, PoreGraph::sink});
      }
  return g;
}

namespace {

// Residual network in CSR form. Each undirected edge e becomes arcs 2e (u->v)
// and 2e+1 (v->u), each with capacity one and each the other's reverse.
class Dinic {
 public:
  explicit Dinic(const PoreGraph& g) : n_(g.node_count), edges_(g.edges) {
    const std::size_t n = static_cast<std::size_t>(n_);
    first_.assign(n + 1, 0);
    for (const auto& e : edges_) {
      ++first_[static_cast<std::size_t>(e.u) + 1];
      ++first_[static_cast<std::size_t>(e.v) + 1];
    }
    for (std::size_t i = 0; i < n; ++i) first_[i + 1] += first_[i];
    arc_of_slot_.resize(2 * edges_.size());
    std::vector<std::size_t> fill(first_.begin(), first_.end() - 1);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      arc_of_slot_[fill[static_cast<std::size_t>(edges_[e].u)]++] = 2 * e;
      arc_of_slot_[fill[static_cast<std::size_t>(edges_[e].v)]++] = 2 * e + 1;
    }
    residual_.assign(2 * edges_.size(), 1);
    level_.resize(n);
    cursor_.resize(n);
  }

  std::int64_t run() {
    std::int64_t flow = 0;
    while (build_levels()) {
      for (std::size_t i = 0; i < cursor_.size(); ++i) cursor_[i] = first_[i];
      while (augment()) ++flow;
    }
    return flow;
  }

  /// Nodes reachable from the source in the final residual network.
  std::vector<bool> source_side() const {
    std::vector<bool> seen(static_cast<std::size_t>(n_), false);
    std::vector<std::int32_t> queue{PoreGraph::source};
    seen[PoreGraph::source] = true;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto u = static_cast<std::size_t>(queue[head]);
      for (std::size_t s = first_[u]; s < first_[u + 1]; ++s) {
        const std::size_t arc = arc_of_slot_[s];
        const auto v = static_cast<std::size_t>(head_of(arc));
        if (residual_[arc] > 0 && !seen[v]) {
          seen[v] = true;
          queue.push_back(static_cast<std::int32_t>(v));
        }
      }
    }
    return seen;
  }

 private:
  std::int32_t head_of(std::size_t arc) const {
    const GraphEdge& e = edges_[arc / 2];
    return (arc & 1u) ? e.u : e.v;
  }

  bool build_levels() {
    std::fill(level_.begin(), level_.end(), -1);
    std::vector<std::int32_t> queue{PoreGraph::source};
    level_[PoreGraph::source] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto u = static_cast<std::size_t>(queue[head]);
      for (std::size_t s = first_[u]; s < first_[u + 1]; ++s) {
        const std::size_t arc = arc_of_slot_[s];
        const auto v = static_cast<std::size_t>(head_of(arc));
        if (residual_[arc] > 0 && level_[v] < 0) {
          level_[v] = level_[u] + 1;
          queue.push_back(static_cast<std::int32_t>(v));
        }
      }
    }
    return level_[PoreGraph::sink] >= 0;
  }

  // One unit augmenting path along the level graph; iterative so that long
  // tortuous paths in large samples cannot exhaust the call stack.
  bool augment() {
    path_.clear();
    std::size_t u = PoreGraph::source;
    while (u != static_cast<std::size_t>(PoreGraph::sink)) {
      bool advanced = false;
      for (std::size_t& s = cursor_[u]; s < first_[u + 1]; ++s) {
        const std::size_t arc = arc_of_slot_[s];
        const auto v = static_cast<std::size_t>(head_of(arc));
        if (residual_[arc] > 0 && level_[v] == level_[u] + 1) {
          path_.push_back(arc);
          u = v;
          advanced = true;
          break;
        }
      }
      if (advanced) continue;
      // Dead end: remove u from the level graph and retreat.
      level_[u] = -1;
      if (path_.empty()) return false;
      const std::size_t arc = path_.back();
      path_.pop_back();
      u = static_cast<std::size_t>(head_of(arc ^ 1u));
      ++cursor_[u];
    }
    for (std::size_t arc : path_) {
      --residual_[arc];
      ++residual_[arc ^ 1u];
    }
    return true;
  }

  std::int32_t n_;
  const std::vector<GraphEdge>& edges_;
  std::vector<std::size_t> first_;
  std::vector<std::size_t> arc_of_slot_;
  std::vector<std::int8_t> residual_;
  std::vector<std::int32_t> level_;
  std::vector<std::size_t> cursor_;
  std::vector<std::size_t> path_;
};

}  // namespace

MaxFlowResult max_flow_min_cut(const PoreGraph& graph) {
  Dinic dinic(graph);
  MaxFlowResult result;
  result.value = dinic.run();
  const std::vector<bool> side = dinic.source_side();
  for (const auto& e : graph.edges)
    if (side[static_cast<std::size_t>(e.u)] != side[static_cast<std::size_t>(e.v)]) result.cut.push_back(e);
  return result;
}

std::int64_t max_flow(const PoreGraph& graph) { return Dinic(graph).run(); }

std::vector<GraphEdge> min_cut(const PoreGraph& graph) { return max_flow_min_cut(graph).cut; }

void write_edge_list(const PoreGraph& graph, std::ostream& out) {
  out << "# nodes " << graph.node_count << " source " << PoreGraph::source << " sink " << PoreGraph::sink << '\n';
  for (const auto& e : graph.edges) out << e.u << ' ' << e.v << '\n';
}

PowerLawFit bentheimer_fit() { return {50625.0 * std::pow(10.0, -8.183), 1.407, 0.8692}; }

PowerLawFit fit_power_law(std::span<const FlowPermeabilityPair> pairs) {
  if (pairs.size() < 2) throw FitError("power-law fit needs at least two (f_max, k) pairs");

  double sx = 0, sy = 0;
  for (const auto& p : pairs) {
    if (!(p.f_max > 0) || !(p.k > 0)) throw FitError("power-law fit requires f_max > 0 and k > 0");
    sx += std::log10(p.f_max);
    sy += std::log10(p.k);
  }
  const auto n = static_cast<double>(pairs.size());
  const double mx = sx / n;
  const double my = sy / n;

  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& p : pairs) {
    const double dx = std::log10(p.f_max) - mx;
    const double dy = std::log10(p.k) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0) throw FitError("power-law fit is degenerate: all f_max values are equal");

  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;

  double ss_res = 0;
  for (const auto& p : pairs) {
    const double r = std::log10(p.k) - (intercept + slope * std::log10(p.f_max));
    ss_res += r * r;
  }
  PowerLawFit fit;
  fit.exponent = slope;
  fit.coefficient = std::pow(10.0, intercept);
  fit.r_squared_log = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

double predict_baseline(double f_max, const PowerLawFit& fit) {
  if (f_max < 0) throw ArgumentError("f_max must be non-negative");
  if (f_max == 0) return 0.0;
  return fit.coefficient * std::pow(f_max, fit.exponent);
}

}  // namespace rockperm
