#include "rockperm/stokes/assembly.hpp"

#include <algorithm>
#include <thread>

#include "rockperm/errors.hpp"
#include "rockperm/stokes/reference_element.hpp"

namespace rockperm::stokes {

namespace {

/// Per-cell DOF table: entry [cell * width + local] is a global index.
struct DofTable {
  const std::int32_t* data = nullptr;
  int width = 0;
  std::int32_t operator()(std::size_t cell, int local) const { return data[cell * static_cast<std::size_t>(width) + local]; }
};

/// One column block of a cellwise operator: global columns are offset + cols(cell, b).
struct ColumnBlock {
  DofTable cols;
  Eigen::Index offset = 0;
  Eigen::MatrixXd local;  // rows.width x cols.width
};

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Assembles sum over cells of the scattered local matrices. Each output row is
/// owned by exactly one thread and accumulates its cell contributions in cell
/// order, so the result is bitwise independent of the thread count.
SparseMatrix assemble_cellwise(std::size_t n_cells, Eigen::Index n_rows, Eigen::Index n_cols, DofTable rows,
                               const std::vector<ColumnBlock>& blocks, unsigned threads) {
  // Row -> (cell, local row) incidence, cells ascending within each row.
  std::vector<std::size_t> first(static_cast<std::size_t>(n_rows) + 1, 0);
  for (std::size_t c = 0; c < n_cells; ++c)
    for (int a = 0; a < rows.width; ++a) ++first[static_cast<std::size_t>(rows(c, a)) + 1];
  for (std::size_t r = 0; r < static_cast<std::size_t>(n_rows); ++r) first[r + 1] += first[r];
  std::vector<std::pair<std::int32_t, int>> incidence(first.back());
  {
    std::vector<std::size_t> fill(first.begin(), first.end() - 1);
    for (std::size_t c = 0; c < n_cells; ++c)
      for (int a = 0; a < rows.width; ++a)
        incidence[fill[static_cast<std::size_t>(rows(c, a))]++] = {static_cast<std::int32_t>(c), a};
  }

  struct Chunk {
    std::vector<int> row_nnz;
    std::vector<int> cols;
    std::vector<double> vals;
  };
  const unsigned n_threads = std::min<unsigned>(resolve_threads(threads), std::max<Eigen::Index>(1, n_rows / 64 + 1));
  std::vector<Chunk> chunks(n_threads);

  auto work = [&](unsigned t) {
    const auto begin = static_cast<std::size_t>(n_rows) * t / n_threads;
    const auto end = static_cast<std::size_t>(n_rows) * (t + 1) / n_threads;
    Chunk& out = chunks[t];
    std::vector<int> row_cols;
    std::vector<double> row_vals;
    for (std::size_t r = begin; r < end; ++r) {
      row_cols.clear();
      for (std::size_t k = first[r]; k < first[r + 1]; ++k) {
        const auto cell = static_cast<std::size_t>(incidence[k].first);
        for (const auto& blk : blocks)
          for (int b = 0; b < blk.cols.width; ++b)
            row_cols.push_back(static_cast<int>(blk.offset + blk.cols(cell, b)));
      }
      std::sort(row_cols.begin(), row_cols.end());
      row_cols.erase(std::unique(row_cols.begin(), row_cols.end()), row_cols.end());
      row_vals.assign(row_cols.size(), 0.0);
      for (std::size_t k = first[r]; k < first[r + 1]; ++k) {
        const auto cell = static_cast<std::size_t>(incidence[k].first);
        const int a = incidence[k].second;
        for (const auto& blk : blocks)
          for (int b = 0; b < blk.cols.width; ++b) {
            const int col = static_cast<int>(blk.offset + blk.cols(cell, b));
            const auto pos = std::lower_bound(row_cols.begin(), row_cols.end(), col) - row_cols.begin();
            row_vals[static_cast<std::size_t>(pos)] += blk.local(a, b);
          }
      }
      out.row_nnz.push_back(static_cast<int>(row_cols.size()));
      out.cols.insert(out.cols.end(), row_cols.begin(), row_cols.end());
      out.vals.insert(out.vals.end(), row_vals.begin(), row_vals.end());
    }
  };

  if (n_threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(work, t);
  }

  std::vector<int> outer(static_cast<std::size_t>(n_rows) + 1, 0);
  std::vector<int> inner;
  std::vector<double> values;
  std::size_t r = 0;
  for (auto& ch : chunks) {
    for (int nnz : ch.row_nnz) {
      outer[r + 1] = outer[r] + nnz;
      ++r;
    }
    inner.insert(inner.end(), ch.cols.begin(), ch.cols.end());
    values.insert(values.end(), ch.vals.begin(), ch.vals.end());
  }
  const Eigen::Map<const SparseMatrix> view(n_rows, n_cols, static_cast<Eigen::Index>(values.size()), outer.data(),
                                            inner.data(), values.data());
  SparseMatrix result = view;
  result.prune([](Eigen::Index, Eigen::Index, double v) { return v != 0.0; });
  return result;
}

}  // namespace

StokesSystem assemble(const VoxelMesh& mesh, int order, const AssemblyOptions& options) {
  if (order != 0 && order != 1) throw ArgumentError("pressure order must be 0 or 1, got " + std::to_string(order));
  if (!(options.reynolds > 0)) throw ArgumentError("Reynolds number must be positive");

  const ReferenceElement& ref = reference_element(order);
  const double h = mesh.h;
  const double viscosity = 1.0 / options.reynolds;

  StokesSystem sys;
  sys.order = order;
  sys.reynolds = options.reynolds;
  sys.stabilization_beta = options.stabilization_beta;
  sys.dirichlet_eliminated = options.eliminate_dirichlet;
  sys.mesh = mesh;
  sys.velocity_space = make_nodal_space(mesh, order + 1);
  sys.dirichlet = wall_nodes(mesh, sys.velocity_space);

  const std::size_t n_cells = mesh.cell_count();
  const auto nodes = static_cast<Eigen::Index>(sys.velocity_space.size());
  const DofTable vel{sys.velocity_space.cell_nodes.data(), ref.velocity_nodes};

  // Pressure DOFs: one per cell (order 0) or trilinear nodes (order 1).
  std::vector<std::int32_t> cell_ids;
  DofTable pre;
  Eigen::Index m = 0;
  if (order == 0) {
    cell_ids.resize(n_cells);
    for (std::size_t c = 0; c < n_cells; ++c) cell_ids[c] = static_cast<std::int32_t>(c);
    pre = {cell_ids.data(), 1};
    m = static_cast<Eigen::Index>(n_cells);
  } else {
    sys.pressure_space = make_nodal_space(mesh, 1);
    pre = {sys.pressure_space.cell_nodes.data(), ref.pressure_nodes};
    m = static_cast<Eigen::Index>(sys.pressure_space.size());
  }

  sys.laplacian =
      assemble_cellwise(n_cells, nodes, nodes, vel, {{vel, 0, (viscosity * h) * ref.stiffness}}, options.threads);

  std::vector<ColumnBlock> div_blocks;
  for (int c = 0; c < 3; ++c) div_blocks.push_back({vel, c * nodes, (h * h) * ref.divergence[c]});
  sys.B = assemble_cellwise(n_cells, m, 3 * nodes, pre, div_blocks, options.threads);

  sys.W = assemble_cellwise(n_cells, m, m, pre, {{pre, 0, (h * h * h) * ref.pressure_mass}}, options.threads);

  // Jump stabilization over interior faces: beta * h^2 * |face| per face, the planar h^2 weighting
  // carried over to face integrals, divided by the viscosity so k does not depend on Re.
  sys.C.resize(m, m);
  if (order == 0) {
    const double weight = options.stabilization_beta * (h * h) * (h * h) / viscosity;
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t c = 0; c < n_cells; ++c) {
      const auto& cell = mesh.cells[c];
      const auto k = static_cast<int>(c);
      const std::int32_t neighbours[3] = {mesh.find_cell(cell[0] + 1, cell[1], cell[2]),
                                          mesh.find_cell(cell[0], cell[1] + 1, cell[2]),
                                          mesh.find_cell(cell[0], cell[1], cell[2] + 1)};
      for (std::int32_t l : neighbours) {
        if (l < 0) continue;
        trip.emplace_back(k, k, weight);
        trip.emplace_back(l, l, weight);
        trip.emplace_back(k, l, -weight);
        trip.emplace_back(l, k, -weight);
      }
    }
    sys.C.setFromTriplets(trip.begin(), trip.end());
  }

  // Traction data e_x on the inflow and outflow faces: only the x component is loaded.
  sys.rhs = Eigen::VectorXd::Zero(3 * nodes);
  const int npc = ref.velocity_nodes;
  for (const auto& f : mesh.boundary_faces) {
    if (f.tag == BoundaryTag::wall) continue;
    const auto local = face_local_nodes(order + 1, f.face);
    for (std::size_t a = 0; a < local.size(); ++a) {
      const auto node = sys.velocity_space.cell_nodes[static_cast<std::size_t>(f.cell) * npc + local[a]];
      sys.rhs(node) += h * h * ref.face_weights(static_cast<Eigen::Index>(a));
    }
  }

  if (options.eliminate_dirichlet) {
    // Symmetric elimination of homogeneous no-slip values: identity rows in A,
    // zero coupling to the pressure, zero load.
    auto& L = sys.laplacian;
    for (Eigen::Index r = 0; r < L.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(L, r); it; ++it) {
        if (sys.dirichlet[static_cast<std::size_t>(r)])
          it.valueRef() = it.col() == r ? 1.0 : 0.0;
        else if (sys.dirichlet[static_cast<std::size_t>(it.col())])
          it.valueRef() = 0.0;
      }
    L.prune([](Eigen::Index, Eigen::Index, double v) { return v != 0.0; });

    for (Eigen::Index r = 0; r < sys.B.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(sys.B, r); it; ++it)
        if (sys.dirichlet[static_cast<std::size_t>(it.col() % nodes)]) it.valueRef() = 0.0;
    sys.B.prune([](Eigen::Index, Eigen::Index, double v) { return v != 0.0; });

    for (Eigen::Index node = 0; node < nodes; ++node)
      if (sys.dirichlet[static_cast<std::size_t>(node)])
        for (int c = 0; c < 3; ++c) sys.rhs(c * nodes + node) = 0.0;
  }
  return sys;
}

void StokesSystem::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  const Eigen::Index nv = velocity_nodes();
  const Eigen::Index nn = n();
  y.resize(nn + m());
  for (int c = 0; c < 3; ++c) y.segment(c * nv, nv).noalias() = laplacian * x.segment(c * nv, nv);
  y.head(nn).noalias() += B.transpose() * x.tail(m());
  y.tail(m()).noalias() = B * x.head(nn);
  if (order == 0) y.tail(m()).noalias() -= C * x.tail(m());
}

std::vector<Eigen::Index> StokesSystem::dirichlet_dofs() const {
  std::vector<Eigen::Index> dofs;
  const Eigen::Index nv = velocity_nodes();
  for (int c = 0; c < 3; ++c)
    for (Eigen::Index i = 0; i < nv; ++i)
      if (dirichlet[static_cast<std::size_t>(i)]) dofs.push_back(c * nv + i);
  return dofs;
}

SparseMatrix StokesSystem::A() const {
  const Eigen::Index nv = velocity_nodes();
  std::vector<Eigen::Triplet<double>> trip;
  for (int c = 0; c < 3; ++c)
    for (Eigen::Index r = 0; r < laplacian.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(laplacian, r); it; ++it)
        trip.emplace_back(c * nv + r, c * nv + it.col(), it.value());
  SparseMatrix a(3 * nv, 3 * nv);
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

SparseMatrix StokesSystem::saddle_matrix() const {
  const Eigen::Index nn = n();
  std::vector<Eigen::Triplet<double>> trip;
  const SparseMatrix a = A();
  for (Eigen::Index r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) trip.emplace_back(r, it.col(), it.value());
  for (Eigen::Index r = 0; r < B.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(B, r); it; ++it) {
      trip.emplace_back(nn + r, it.col(), it.value());
      trip.emplace_back(it.col(), nn + r, it.value());
    }
  for (Eigen::Index r = 0; r < C.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(C, r); it; ++it) trip.emplace_back(nn + r, nn + it.col(), -it.value());
  SparseMatrix k(nn + m(), nn + m());
  k.setFromTriplets(trip.begin(), trip.end());
  return k;
}

Eigen::VectorXd StokesSystem::full_rhs() const {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n() + m());
  f.head(n()) = rhs;
  return f;
}

}  // namespace rockperm::stokes
