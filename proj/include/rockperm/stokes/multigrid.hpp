#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rockperm/stokes/mesh.hpp"

namespace rockperm::stokes {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Approximate inverse of one diagonal block. Implementations must be linear,
/// symmetric and positive definite so that MINRES stays applicable.
class BlockApproximation {
 public:
  virtual ~BlockApproximation() = default;
  virtual void apply(const Eigen::VectorXd& r, Eigen::VectorXd& z) const = 0;
  virtual std::string name() const = 0;
};

class JacobiApproximation final : public BlockApproximation {
 public:
  explicit JacobiApproximation(const SparseMatrix& a);
  void apply(const Eigen::VectorXd& r, Eigen::VectorXd& z) const override;
  std::string name() const override { return "jacobi"; }

 private:
  Eigen::VectorXd inverse_diagonal_;
};

/// Fixed-degree Chebyshev iteration on D^-1 a with known eigenvalue bounds.
/// For a trilinear mass matrix the bounds [1/8, 27/8] hold element by element.
class ChebyshevApproximation final : public BlockApproximation {
 public:
  ChebyshevApproximation(const SparseMatrix& a, double lambda_min, double lambda_max, int degree);
  void apply(const Eigen::VectorXd& r, Eigen::VectorXd& z) const override;
  std::string name() const override { return "chebyshev-jacobi"; }

 private:
  SparseMatrix a_;
  Eigen::VectorXd inverse_diagonal_;
  double lambda_min_, lambda_max_;
  int degree_;
};

struct MultigridOptions {
  int smoothing_steps = 2;
  /// Levels are coarsened until the operator has at most this many rows.
  Eigen::Index coarsest_size = 1500;
};

/// Geometric V-cycle for the scalar velocity Laplacian. Coarse spaces are trilinear
/// functions on lattices of doubling spacing (Q2 -> Q1 on the same cells, then one
/// refinement level at a time), restricted to free nodes; coarse operators are
/// Galerkin products. Symmetric Gauss-Seidel smoothing, dense LDLT on the coarsest level.
class GeometricMultigrid final : public BlockApproximation {
 public:
  GeometricMultigrid(const SparseMatrix& a, const NodalSpace& space, const std::vector<char>& dirichlet,
                     MultigridOptions options = {});
  void apply(const Eigen::VectorXd& r, Eigen::VectorXd& z) const override;
  std::string name() const override { return "geometric-multigrid"; }

  std::size_t level_count() const { return levels_.size(); }
  Eigen::Index level_size(std::size_t level) const { return levels_[level].a.rows(); }

 private:
  struct Level {
    SparseMatrix a;
    SparseMatrix prolongation;  // from the next coarser level into this one
    Eigen::VectorXd inverse_diagonal;
  };

  void cycle(std::size_t level, const Eigen::VectorXd& r, Eigen::VectorXd& z) const;
  void gauss_seidel(const Level& lvl, const Eigen::VectorXd& r, Eigen::VectorXd& z, bool forward) const;

  MultigridOptions options_;
  std::vector<Level> levels_;
  Eigen::LDLT<Eigen::MatrixXd> coarse_solver_;
};

}  // namespace rockperm::stokes
