#include <doctest.h>

#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "../support.hpp"
#include "rockperm/errors.hpp"
#include "rockperm/pipeline.hpp"
#include "rockperm/stokes/assembly.hpp"
#include "rockperm/stokes/mesh.hpp"
#include "rockperm/stokes/minres.hpp"
#include "rockperm/stokes/multigrid.hpp"
#include "rockperm/stokes/permeability.hpp"
#include "rockperm/stokes/preconditioner.hpp"
#include "rockperm/stokes/solver.hpp"

using namespace rockperm;
using namespace rockperm::stokes;
using rockperm::testing::duct;

namespace {

Eigen::VectorXd random_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

}  // namespace

TEST_CASE("MINRES on a dense indefinite system") {
  const Eigen::Index n = 30;
  const Eigen::MatrixXd gauss = random_vector(n * n, 1).reshaped(n, n);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(gauss).householderQ();
  Eigen::VectorXd lambda = Eigen::VectorXd::LinSpaced(n, 1.0, 5.0);
  for (Eigen::Index i = 0; i < n; i += 3) lambda(i) = -lambda(i);
  const Eigen::MatrixXd a = q * lambda.asDiagonal() * q.transpose();
  const Eigen::VectorXd b = random_vector(n, 2);

  Eigen::VectorXd x;
  const auto rep = minres<double>([&](const Eigen::VectorXd& v, Eigen::VectorXd& y) { y = a * v; },
                                  [](const Eigen::VectorXd& r, Eigen::VectorXd& z) { z = r; }, b, x,
                                  MinresControl{1e-12, 200, true});
  CHECK(rep.converged);
  CHECK(rep.iterations <= n + 2);
  CHECK((x - a.lu().solve(b)).norm() < 1e-9 * b.norm());
  CHECK(rep.history.front() == 1.0);
  CHECK(rep.history.size() == static_cast<std::size_t>(rep.iterations) + 1);
  // MINRES residuals never increase.
  for (std::size_t i = 1; i < rep.history.size(); ++i) CHECK(rep.history[i] <= rep.history[i - 1] * (1 + 1e-12));

  Eigen::VectorXd zero_x;
  const auto zero = minres<double>([&](const Eigen::VectorXd& v, Eigen::VectorXd& y) { y = a * v; },
                                   [](const Eigen::VectorXd& r, Eigen::VectorXd& z) { z = r; },
                                   Eigen::VectorXd::Zero(n).eval(), zero_x);
  CHECK(zero.iterations == 0);
  CHECK(zero.converged);
  CHECK(zero_x.norm() == 0.0);
}

TEST_CASE("block approximations are symmetric and positive") {
  const auto g = rockperm::testing::random_grid({6, 6, 6}, 0.75, 4);
  const auto p = retain_percolating(g);
  REQUIRE(p.permeable);
  const auto sys = assemble(build_mesh(p.grid, 0), 1);
  for (auto kind : {PreconditionerKind::multigrid, PreconditionerKind::jacobi}) {
    const StokesPreconditioner pc(sys, kind);
    const Eigen::Index n = sys.n() + sys.m();
    const Eigen::VectorXd x = random_vector(n, 7), y = random_vector(n, 8);
    Eigen::VectorXd mx, my;
    pc.apply(x, mx);
    pc.apply(y, my);
    CHECK(x.dot(my) == doctest::Approx(y.dot(mx)).epsilon(1e-9));
    CHECK(x.dot(mx) > 0);
  }

  MultigridOptions small;
  small.coarsest_size = 50;
  const GeometricMultigrid mg(sys.laplacian, sys.velocity_space, sys.dirichlet, small);
  CHECK(mg.level_count() >= 2);
  for (std::size_t l = 1; l < mg.level_count(); ++l) CHECK(mg.level_size(l) < mg.level_size(l - 1));

  const ChebyshevApproximation cheb(sys.W, 1.0 / 8.0, 27.0 / 8.0, 6);
  const Eigen::VectorXd r = random_vector(sys.m(), 3);
  Eigen::VectorXd z;
  cheb.apply(r, z);
  const Eigen::VectorXd exact = Eigen::MatrixXd(sys.W).ldlt().solve(r);
  // Degree-k Chebyshev on [a, b] damps the W-norm error by 1 / T_k((b + a) / (b - a)).
  const double rho = (std::sqrt(27.0) - 1.0) / (std::sqrt(27.0) + 1.0);
  const double damping = 2 * std::pow(rho, 6) / (1 + std::pow(rho, 12));
  auto w_norm = [&](const Eigen::VectorXd& v) { return std::sqrt(v.dot(sys.W * v)); };
  CHECK(w_norm(z - exact) <= damping * w_norm(exact));
  CHECK_THROWS_AS(ChebyshevApproximation(sys.W, 2.0, 1.0, 3), ArgumentError);
  CHECK(parse_preconditioner("gmg") == PreconditionerKind::multigrid);
  CHECK_THROWS(parse_preconditioner("ilu"));
}

TEST_CASE("MINRES agrees with a dense LU solve of the saddle system") {
  VoxelGrid g({2, 1, 1}, 1.0);
  g.fill(true);
  for (int order : {0, 1}) {
    const auto sys = assemble(build_mesh(g, 1), order);
    const Eigen::MatrixXd s = Eigen::MatrixXd(sys.saddle_matrix());
    const Eigen::VectorXd exact = s.partialPivLu().solve(sys.full_rhs());
    for (auto kind : {PreconditionerKind::multigrid, PreconditionerKind::jacobi}) {
      const StokesPreconditioner pc(sys, kind);
      const auto sol = minres_solve(sys, pc, {1e-12, 5000});
      CHECK((sol.velocity - exact.head(sys.n())).norm() < 1e-8 * exact.norm());
      CHECK((sol.pressure - exact.tail(sys.m())).norm() < 1e-8 * exact.norm());
    }
  }
}

TEST_CASE("iteration cap raises with the residual history") {
  const auto g = duct({4, 3, 3}, 1, 1, 1, 1);
  const auto sys = assemble(build_mesh(g, 1), 1);
  const StokesPreconditioner pc(sys, PreconditionerKind::jacobi);
  try {
    minres_solve(sys, pc, {1e-12, 3});
    FAIL("expected NonConvergenceError");
  } catch (const NonConvergenceError& e) {
    CHECK(e.residual_history().size() == 4);
  }
}

TEST_CASE("permeability of a duct") {
  const auto g = duct({6, 4, 4}, 1, 2, 1, 2, 1e-6);
  FlowOptions opt;
  FlowFields fields;
  const auto r = solve_flow(g, opt, &fields);
  CHECK(r.pressure_in == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.pressure_out == doctest::Approx(-1.0).epsilon(1e-3));
  CHECK(std::abs(r.flux_in + r.flux_out) <= 1e-5 * std::abs(r.flux_out));
  CHECK(r.flux_out > 0);
  CHECK(r.k_m2 == doctest::Approx(r.darcy_number * 6e-6 * 6e-6));

  // Square duct of side 1/3 in the unit cube.
  const double k_ana = analytic_channel_permeability(1.0 / 3.0, 1.0 / 3.0);
  CHECK(r.darcy_number == doctest::Approx(k_ana).epsilon(0.05));

  SUBCASE("a constant pressure shift changes nothing") {
    auto shifted = fields.solution;
    shifted.pressure.array() += 3.5;
    const auto k = compute_permeability(shifted, fields.system, 6e-6);
    CHECK(k.darcy_number == doctest::Approx(r.darcy_number).epsilon(1e-12));
  }
  SUBCASE("Reynolds number drops out") {
    FlowOptions re10 = opt;
    re10.reynolds = 10.0;
    re10.rel_tol = 1e-10;
    FlowOptions re1 = opt;
    re1.rel_tol = 1e-10;
    CHECK(solve_flow(g, re10).k_m2 == doctest::Approx(solve_flow(g, re1).k_m2).epsilon(1e-6));
  }
  SUBCASE("order 0 and refinement") {
    FlowOptions low = opt;
    low.order = 0;
    low.refinement = 1;
    CHECK(solve_flow(g, low).darcy_number == doctest::Approx(k_ana).epsilon(0.2));
  }
}

TEST_CASE("a quarter turn only relabels the mesh") {
  VoxelGrid parent({5, 5, 5}, 1.0);
  for (int z = 0; z < 5; ++z)
    for (int x = 1; x < 3; ++x) parent.set(x, 2, z, true);
  const auto rotated = rotate90(parent, Axis::y);  // parent z duct now runs along x
  const auto transposed = duct({5, 5, 5}, 2, 1, 2, 2);
  const auto direct = duct({5, 5, 5}, 1, 2, 2, 1);
  FlowOptions opt;
  opt.rel_tol = 1e-10;
  const double k_rot = solve_flow(rotated, opt).darcy_number;
  CHECK(k_rot == doctest::Approx(solve_flow(transposed, opt).darcy_number).epsilon(1e-12));
  CHECK(k_rot == doctest::Approx(solve_flow(direct, opt).darcy_number).epsilon(1e-6));
}

TEST_CASE("analytic duct series") {
  CHECK(channel_series_bound(1) == doctest::Approx(192.0 / (128.0 * std::pow(std::numbers::pi, 5))));
  CHECK(channel_series_bound(10) == doctest::Approx(0.0049e-4).epsilon(0.01));
  const double k200 = channel_series(0.06, 0.03, 200);
  for (int j : {1, 5, 10}) CHECK(std::abs(channel_series(0.06, 0.03, j) - k200) <= channel_series_bound(j));
  CHECK(channel_series(0.06, 0.03, 10) == channel_series(0.03, 0.06, 10));
  const double plates = analytic_channel_permeability(0.4e-3, 0.4);
  CHECK(plates == doctest::Approx(std::pow(0.4e-3, 3) * 0.4 / 12).epsilon(1e-3));
  CHECK(analytic_channel_permeability(0.06, 0.03) == doctest::Approx(9.261611e-8).epsilon(1e-6));
  CHECK_THROWS_AS(analytic_channel_permeability(0.6, 0.1), ArgumentError);
  CHECK_THROWS_AS(analytic_channel_permeability(0.0, 0.1), ArgumentError);
  CHECK_THROWS_AS(channel_series(0.1, 0.1, 0), ArgumentError);
}
