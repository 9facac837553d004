#include "rockperm/stokes/multigrid.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "rockperm/errors.hpp"

namespace rockperm::stokes {

namespace {

Eigen::VectorXd inverse_diagonal(const SparseMatrix& a) {
  Eigen::VectorXd d = a.diagonal();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d(i) > 0)) throw ArgumentError("block approximation requires a positive diagonal");
    d(i) = 1.0 / d(i);
  }
  return d;
}

using Lattice = std::array<std::int64_t, 3>;

struct CoarseSpace {
  std::vector<Lattice> coords;
  SparseMatrix prolongation;  // fine x coarse
};

// Trilinear interpolation from the lattice of twice the spacing. Only nodes
// listed in `active` receive interpolated values; the rest get zero rows.
CoarseSpace coarsen(const std::vector<Lattice>& fine, const std::vector<char>& active) {
  struct Entry {
    Eigen::Index row;
    Lattice coarse;
    double weight;
  };
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    if (!active[i]) continue;
    std::array<std::array<std::pair<std::int64_t, double>, 2>, 3> parents;
    std::array<int, 3> count{};
    for (int a = 0; a < 3; ++a) {
      const std::int64_t c = fine[i][a];
      if (c % 2 == 0) {
        parents[a][0] = {c / 2, 1.0};
        count[a] = 1;
      } else {
        parents[a][0] = {(c - 1) / 2, 0.5};
        parents[a][1] = {(c + 1) / 2, 0.5};
        count[a] = 2;
      }
    }
    for (int iz = 0; iz < count[2]; ++iz)
      for (int iy = 0; iy < count[1]; ++iy)
        for (int ix = 0; ix < count[0]; ++ix)
          entries.push_back({static_cast<Eigen::Index>(i),
                             {parents[0][ix].first, parents[1][iy].first, parents[2][iz].first},
                             parents[0][ix].second * parents[1][iy].second * parents[2][iz].second});
  }

  CoarseSpace out;
  for (const auto& e : entries) out.coords.push_back(e.coarse);
  auto lex = [](const Lattice& a, const Lattice& b) {
    return std::tie(a[2], a[1], a[0]) < std::tie(b[2], b[1], b[0]);
  };
  std::sort(out.coords.begin(), out.coords.end(), lex);
  out.coords.erase(std::unique(out.coords.begin(), out.coords.end()), out.coords.end());

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(entries.size());
  for (const auto& e : entries) {
    const auto it = std::lower_bound(out.coords.begin(), out.coords.end(), e.coarse, lex);
    trip.emplace_back(e.row, static_cast<Eigen::Index>(it - out.coords.begin()), e.weight);
  }
  out.prolongation.resize(static_cast<Eigen::Index>(fine.size()), static_cast<Eigen::Index>(out.coords.size()));
  out.prolongation.setFromTriplets(trip.begin(), trip.end());
  return out;
}

}  // namespace

JacobiApproximation::JacobiApproximation(const SparseMatrix& a) : inverse_diagonal_(inverse_diagonal(a)) {}

void JacobiApproximation::apply(const Eigen::VectorXd& r, Eigen::VectorXd& z) const {
  z = inverse_diagonal_.cwiseProduct(r);
}

ChebyshevApproximation::ChebyshevApproximation(const SparseMatrix& a, double lambda_min, double lambda_max,
                                               int degree)
    : a_(a), inverse_diagonal_(inverse_diagonal(a)), lambda_min_(lambda_min), lambda_max_(lambda_max),
      degree_(degree) {
  if (!(lambda_min > 0 && lambda_max > lambda_min) || degree < 1)
    throw ArgumentError("Chebyshev approximation needs 0 < lambda_min < lambda_max and degree >= 1");
}

void ChebyshevApproximation::apply(const Eigen::VectorXd& r, Eigen::VectorXd& z) const {
  // Standard Chebyshev semi-iteration for D^-1 A z = D^-1 r starting from z = 0.
  const double theta = 0.5 * (lambda_max_ + lambda_min_);
  const double delta = 0.5 * (lambda_max_ - lambda_min_);
  const double sigma = theta / delta;
  double rho = 1.0 / sigma;

  Eigen::VectorXd res = inverse_diagonal_.cwiseProduct(r);
  Eigen::VectorXd d = res / theta;
  z = d;
  Eigen::VectorXd tmp(r.size());
  for (int k = 1; k < degree_; ++k) {
    tmp.noalias() = a_ * z;
    res = inverse_diagonal_.cwiseProduct(r - tmp);
    const double rho_next = 1.0 / (2.0 * sigma - rho);
    d = rho_next * rho * d + (2.0 * rho_next / delta) * res;
    z += d;
    rho = rho_next;
  }
}

GeometricMultigrid::GeometricMultigrid(const SparseMatrix& a, const NodalSpace& space,
                                       const std::vector<char>& dirichlet, MultigridOptions options)
    : options_(options) {
  Level finest;
  finest.a = a;
  finest.inverse_diagonal = inverse_diagonal(a);
  levels_.push_back(std::move(finest));

  std::vector<Lattice> coords(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) coords[i] = space.lattice(i);
  std::vector<char> active(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) active[i] = !dirichlet[i];

  while (levels_.back().a.rows() > options_.coarsest_size && levels_.size() < 24) {
    CoarseSpace coarse = coarsen(coords, active);
    const auto n_fine = levels_.back().a.rows();
    const auto n_coarse = static_cast<Eigen::Index>(coarse.coords.size());
    if (n_coarse == 0 || n_coarse > (n_fine * 9) / 10) break;

    const SparseMatrix ap = levels_.back().a * coarse.prolongation;
    SparseMatrix ac = SparseMatrix(coarse.prolongation.transpose()) * ap;
    ac.prune([](Eigen::Index, Eigen::Index, double v) { return v != 0.0; });

    levels_.back().prolongation = std::move(coarse.prolongation);
    Level next;
    next.a = std::move(ac);
    next.inverse_diagonal = inverse_diagonal(next.a);
    levels_.push_back(std::move(next));
    coords = std::move(coarse.coords);
    active.assign(coords.size(), 1);
  }

  coarse_solver_.compute(Eigen::MatrixXd(levels_.back().a));
}

void GeometricMultigrid::apply(const Eigen::VectorXd& r, Eigen::VectorXd& z) const { cycle(0, r, z); }

void GeometricMultigrid::gauss_seidel(const Level& lvl, const Eigen::VectorXd& r, Eigen::VectorXd& z,
                                      bool forward) const {
  const SparseMatrix& a = lvl.a;
  const Eigen::Index n = a.rows();
  const int* outer = a.outerIndexPtr();
  const int* inner = a.innerIndexPtr();
  const double* val = a.valuePtr();
  for (Eigen::Index s = 0; s < n; ++s) {
    const Eigen::Index i = forward ? s : n - 1 - s;
    double sum = r(i);
    for (int k = outer[i]; k < outer[i + 1]; ++k)
      if (inner[k] != i) sum -= val[k] * z(inner[k]);
    z(i) = sum * lvl.inverse_diagonal(i);
  }
}

void GeometricMultigrid::cycle(std::size_t level, const Eigen::VectorXd& r, Eigen::VectorXd& z) const {
  if (level + 1 == levels_.size()) {
    z = coarse_solver_.solve(r);
    return;
  }
  const Level& lvl = levels_[level];
  z = Eigen::VectorXd::Zero(r.size());
  for (int s = 0; s < options_.smoothing_steps; ++s) gauss_seidel(lvl, r, z, true);

  const Eigen::VectorXd residual = r - lvl.a * z;
  const Eigen::VectorXd coarse_r = lvl.prolongation.transpose() * residual;
  Eigen::VectorXd coarse_z;
  cycle(level + 1, coarse_r, coarse_z);
  z.noalias() += lvl.prolongation * coarse_z;

  for (int s = 0; s < options_.smoothing_steps; ++s) gauss_seidel(lvl, r, z, false);
}

}  // namespace rockperm::stokes
