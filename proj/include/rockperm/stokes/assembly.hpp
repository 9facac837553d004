#pragma once

#include <vector>

#include <Eigen/Sparse>

#include "rockperm/stokes/mesh.hpp"

namespace rockperm::stokes {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

struct AssemblyOptions {
  double reynolds = 1.0;
  /// Weight of the pressure-jump stabilization used by the order-0 pair (per face: beta * h^2 * |face|).
  double stabilization_beta = 1.0;
  /// When false, blocks are returned before no-slip rows/columns are removed.
  bool eliminate_dirichlet = true;
  /// Worker threads for matrix assembly; 0 = hardware concurrency. Results do not depend on it.
  unsigned threads = 0;
};

/// Discrete Stokes saddle-point system
///
///   [ A  B^T ] [u]   [b]
///   [ B  -C  ] [p] = [0]
///
/// for the Q_{order+1}^3 / Q_order pair (order 0: discontinuous piecewise-constant
/// pressure with jump stabilization C; order 1: continuous trilinear pressure, C = 0).
/// Velocity unknowns are blocked by component: u = (u_x, u_y, u_z), each indexed
/// like `velocity_space`, so A = I_3 (x) laplacian.
struct StokesSystem {
  int order = 1;
  double reynolds = 1.0;
  double stabilization_beta = 1.0;
  bool dirichlet_eliminated = true;

  VoxelMesh mesh;
  NodalSpace velocity_space;
  NodalSpace pressure_space;  // only meaningful for order 1
  std::vector<char> dirichlet;  // per velocity node: lies on the no-slip boundary

  SparseMatrix laplacian;  // scalar block of A, already scaled by 1/Re
  SparseMatrix B;          // m x n
  SparseMatrix C;          // m x m
  SparseMatrix W;          // m x m pressure mass matrix
  Eigen::VectorXd rhs;     // length n

  Eigen::Index velocity_nodes() const { return laplacian.rows(); }
  Eigen::Index n() const { return 3 * laplacian.rows(); }
  Eigen::Index m() const { return B.rows(); }

  /// y = [[A, B^T], [B, -C]] x
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;

  /// Velocity DOF indices (component-blocked) on the no-slip boundary.
  std::vector<Eigen::Index> dirichlet_dofs() const;

  /// Materialized blocks, intended for small systems and tests.
  SparseMatrix A() const;
  SparseMatrix saddle_matrix() const;
  Eigen::VectorXd full_rhs() const;
};

StokesSystem assemble(const VoxelMesh& mesh, int order, const AssemblyOptions& options = {});

}  // namespace rockperm::stokes
