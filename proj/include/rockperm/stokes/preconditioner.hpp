#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "rockperm/stokes/assembly.hpp"
#include "rockperm/stokes/multigrid.hpp"

namespace rockperm::stokes {

enum class PreconditionerKind { multigrid, jacobi };

std::string_view to_string(PreconditionerKind kind);
PreconditionerKind parse_preconditioner(std::string_view text);

/// Block-diagonal approximation of diag(A, Re * W)^-1. The velocity approximation
/// acts on the scalar Laplacian and is applied to each component separately.
class BlockDiagonalPreconditioner {
 public:
  BlockDiagonalPreconditioner(std::unique_ptr<BlockApproximation> velocity,
                              std::unique_ptr<BlockApproximation> pressure, Eigen::Index velocity_nodes,
                              Eigen::Index pressure_dofs);

  void apply(const Eigen::VectorXd& r, Eigen::VectorXd& z) const;

  const BlockApproximation& velocity() const { return *velocity_; }
  const BlockApproximation& pressure() const { return *pressure_; }

 private:
  std::unique_ptr<BlockApproximation> velocity_;
  std::unique_ptr<BlockApproximation> pressure_;
  Eigen::Index nodes_;
  Eigen::Index m_;
};

/// Built-in realizations of the block-diagonal preconditioner. Both copy what they
/// need from `system`.
class StokesPreconditioner {
 public:
  StokesPreconditioner(const StokesSystem& system, PreconditionerKind kind, MultigridOptions mg = {});

  void apply(const Eigen::VectorXd& r, Eigen::VectorXd& z) const { blocks_->apply(r, z); }
  const BlockDiagonalPreconditioner& blocks() const { return *blocks_; }
  PreconditionerKind kind() const { return kind_; }

 private:
  PreconditionerKind kind_;
  std::unique_ptr<BlockDiagonalPreconditioner> blocks_;
};

}  // namespace rockperm::stokes
