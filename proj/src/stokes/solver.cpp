#include "rockperm/stokes/solver.hpp"

#include <chrono>
#include <string>

#include "rockperm/errors.hpp"
#include "rockperm/stokes/minres.hpp"

namespace rockperm::stokes {

FlowSolution minres_solve(const StokesSystem& system, const StokesPreconditioner& preconditioner,
                          const SolverOptions& options) {
  if (!(options.rel_tol > 0)) throw ArgumentError("rel_tol must be positive");

  const auto start = std::chrono::steady_clock::now();
  const Eigen::VectorXd f = system.full_rhs();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(f.size());

  const MinresReport report = minres<double>(
      [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) { system.apply(in, out); },
      [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) { preconditioner.apply(in, out); }, f, x,
      MinresControl{options.rel_tol, options.max_iterations, true});

  if (!report.converged)
    throw NonConvergenceError("MINRES did not reach rel_tol " + std::to_string(options.rel_tol) + " within " +
                                  std::to_string(options.max_iterations) + " iterations (residual " +
                                  std::to_string(report.relative_residual) + ")",
                              report.history);

  FlowSolution sol;
  sol.velocity = x.head(system.n());
  sol.pressure = x.tail(system.m());
  sol.iterations = report.iterations;
  sol.achieved_residual = report.relative_residual;
  sol.residual_history = report.history;
  sol.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

}  // namespace rockperm::stokes
