#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rockperm/stokes/assembly.hpp"
#include "rockperm/stokes/preconditioner.hpp"

namespace rockperm::stokes {

/// Discrete velocity and pressure coefficients with solver diagnostics.
struct FlowSolution {
  Eigen::VectorXd velocity;  // length n, component-blocked
  Eigen::VectorXd pressure;  // length m
  int iterations = 0;
  double achieved_residual = 0.0;  // relative, in the preconditioner-induced norm
  std::vector<double> residual_history;
  double solve_seconds = 0.0;
};

struct SolverOptions {
  double rel_tol = 1e-6;
  int max_iterations = 50000;
};

/// MINRES on the full saddle-point matrix. Throws NonConvergenceError (with the
/// residual history) when the iteration cap is reached.
FlowSolution minres_solve(const StokesSystem& system, const StokesPreconditioner& preconditioner,
                          const SolverOptions& options = {});

}  // namespace rockperm::stokes
