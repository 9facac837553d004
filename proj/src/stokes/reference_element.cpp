#include "rockperm/stokes/reference_element.hpp"

#include <cmath>
#include <string>

#include "rockperm/errors.hpp"

namespace rockperm::stokes {

GaussRule gauss_legendre(int n_points) {
  GaussRule rule;
  std::vector<double> x, w;
  switch (n_points) {
    case 1: x = {0.0}; w = {2.0}; break;
    case 2: x = {-1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)}; w = {1.0, 1.0}; break;
    case 3: x = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)}; w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}; break;
    case 4: {
      const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(1.2));
      const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(1.2));
      const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
      const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
      x = {-b, -a, a, b};
      w = {wb, wa, wa, wb};
      break;
    }
    default: throw ArgumentError("gauss_legendre: supported point counts are 1..4");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    rule.points.push_back(0.5 * (x[i] + 1.0));
    rule.weights.push_back(0.5 * w[i]);
  }
  return rule;
}

double lagrange(int q, int i, double x) {
  double v = 1.0;
  const double xi = static_cast<double>(i) / q;
  for (int k = 0; k <= q; ++k) {
    if (k == i) continue;
    const double xk = static_cast<double>(k) / q;
    v *= (x - xk) / (xi - xk);
  }
  return v;
}

double lagrange_derivative(int q, int i, double x) {
  const double xi = static_cast<double>(i) / q;
  double sum = 0.0;
  for (int m = 0; m <= q; ++m) {
    if (m == i) continue;
    double term = 1.0 / (xi - static_cast<double>(m) / q);
    for (int k = 0; k <= q; ++k) {
      if (k == i || k == m) continue;
      const double xk = static_cast<double>(k) / q;
      term *= (x - xk) / (xi - xk);
    }
    sum += term;
  }
  return sum;
}

namespace {

ReferenceElement build(int order) {
  ReferenceElement e;
  e.order = order;
  e.velocity_degree = order + 1;
  const int qv = e.velocity_degree;
  const int nv1 = qv + 1;
  const int np1 = order + 1;
  e.velocity_nodes = nv1 * nv1 * nv1;
  e.pressure_nodes = np1 * np1 * np1;

  const GaussRule rule = gauss_legendre(order + 2);
  const auto nq = static_cast<int>(rule.points.size());

  e.stiffness = Eigen::MatrixXd::Zero(e.velocity_nodes, e.velocity_nodes);
  for (auto& d : e.divergence) d = Eigen::MatrixXd::Zero(e.pressure_nodes, e.velocity_nodes);
  e.pressure_mass = Eigen::MatrixXd::Zero(e.pressure_nodes, e.pressure_nodes);

  Eigen::VectorXd psi(e.pressure_nodes);
  Eigen::MatrixXd grad(3, e.velocity_nodes);

  for (int qz = 0; qz < nq; ++qz)
    for (int qy = 0; qy < nq; ++qy)
      for (int qx = 0; qx < nq; ++qx) {
        const std::array<double, 3> p{rule.points[qx], rule.points[qy], rule.points[qz]};
        const double w = rule.weights[qx] * rule.weights[qy] * rule.weights[qz];

        for (int k = 0; k < nv1; ++k)
          for (int j = 0; j < nv1; ++j)
            for (int i = 0; i < nv1; ++i) {
              const int a = i + nv1 * (j + nv1 * k);
              const double lx = lagrange(qv, i, p[0]);
              const double ly = lagrange(qv, j, p[1]);
              const double lz = lagrange(qv, k, p[2]);
              grad(0, a) = lagrange_derivative(qv, i, p[0]) * ly * lz;
              grad(1, a) = lx * lagrange_derivative(qv, j, p[1]) * lz;
              grad(2, a) = lx * ly * lagrange_derivative(qv, k, p[2]);
            }
        for (int k = 0; k < np1; ++k)
          for (int j = 0; j < np1; ++j)
            for (int i = 0; i < np1; ++i) {
              const int a = i + np1 * (j + np1 * k);
              psi(a) = order == 0 ? 1.0
                                  : lagrange(order, i, p[0]) * lagrange(order, j, p[1]) * lagrange(order, k, p[2]);
            }

        e.stiffness.noalias() += w * grad.transpose() * grad;
        for (int c = 0; c < 3; ++c) e.divergence[c].noalias() -= w * psi * grad.row(c);
        e.pressure_mass.noalias() += w * psi * psi.transpose();
      }

  // Face integrals of the velocity basis: tensor product of 1D weights.
  Eigen::VectorXd w1 = Eigen::VectorXd::Zero(nv1);
  for (int q = 0; q < nq; ++q)
    for (int i = 0; i < nv1; ++i) w1(i) += rule.weights[q] * lagrange(qv, i, rule.points[q]);
  e.face_weights.resize(nv1 * nv1);
  for (int j = 0; j < nv1; ++j)
    for (int i = 0; i < nv1; ++i) e.face_weights(i + nv1 * j) = w1(i) * w1(j);
  return e;
}

}  // namespace

const ReferenceElement& reference_element(int order) {
  static const ReferenceElement order0 = build(0);
  static const ReferenceElement order1 = build(1);
  if (order == 0) return order0;
  if (order == 1) return order1;
  throw ArgumentError("unsupported pressure order " + std::to_string(order) + " (expected 0 or 1)");
}

}  // namespace rockperm::stokes
