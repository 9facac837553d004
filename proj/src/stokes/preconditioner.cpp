#include "rockperm/stokes/preconditioner.hpp"

#include <string>

#include "rockperm/errors.hpp"

namespace rockperm::stokes {

std::string_view to_string(PreconditionerKind kind) {
  return kind == PreconditionerKind::multigrid ? "multigrid" : "jacobi";
}

PreconditionerKind parse_preconditioner(std::string_view text) {
  if (text == "multigrid" || text == "gmg") return PreconditionerKind::multigrid;
  if (text == "jacobi") return PreconditionerKind::jacobi;
  throw ArgumentError("unknown preconditioner '" + std::string(text) + "'");
}

BlockDiagonalPreconditioner::BlockDiagonalPreconditioner(std::unique_ptr<BlockApproximation> velocity,
                                                         std::unique_ptr<BlockApproximation> pressure,
                                                         Eigen::Index velocity_nodes, Eigen::Index pressure_dofs)
    : velocity_(std::move(velocity)), pressure_(std::move(pressure)), nodes_(velocity_nodes), m_(pressure_dofs) {}

void BlockDiagonalPreconditioner::apply(const Eigen::VectorXd& r, Eigen::VectorXd& z) const {
  z.resize(3 * nodes_ + m_);
  Eigen::VectorXd in, out;
  for (int c = 0; c < 3; ++c) {
    in = r.segment(c * nodes_, nodes_);
    velocity_->apply(in, out);
    z.segment(c * nodes_, nodes_) = out;
  }
  in = r.tail(m_);
  pressure_->apply(in, out);
  z.tail(m_) = out;
}

StokesPreconditioner::StokesPreconditioner(const StokesSystem& system, PreconditionerKind kind, MultigridOptions mg)
    : kind_(kind) {
  const SparseMatrix scaled_mass = system.reynolds * system.W;
  std::unique_ptr<BlockApproximation> velocity;
  std::unique_ptr<BlockApproximation> pressure;
  if (kind == PreconditionerKind::multigrid)
    velocity = std::make_unique<GeometricMultigrid>(system.laplacian, system.velocity_space, system.dirichlet, mg);
  else
    velocity = std::make_unique<JacobiApproximation>(system.laplacian);

  // The order-0 mass matrix is diagonal, so Jacobi is exact there.
  if (kind == PreconditionerKind::multigrid && system.order == 1)
    pressure = std::make_unique<ChebyshevApproximation>(scaled_mass, 1.0 / 8.0, 27.0 / 8.0, 6);
  else
    pressure = std::make_unique<JacobiApproximation>(scaled_mass);

  blocks_ = std::make_unique<BlockDiagonalPreconditioner>(std::move(velocity), std::move(pressure),
                                                          system.velocity_nodes(), system.m());
}

}  // namespace rockperm::stokes
