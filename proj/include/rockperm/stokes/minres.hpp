#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace rockperm::stokes {

struct MinresControl {
  double rel_tol = 1e-6;
  int max_iterations = 50000;
  bool record_history = true;
};

struct MinresReport {
  int iterations = 0;
  bool converged = false;
  double initial_residual = 0.0;  // ||b - A x0|| in the M-induced norm
  double relative_residual = 0.0;
  std::vector<double> history;    // relative residual after each iteration, starting with 1
};

/// Preconditioned MINRES for symmetric (possibly indefinite) A with a symmetric
/// positive definite preconditioner M ~ P^-1. `apply_a(x, y)` computes y = A x and
/// `apply_m(r, z)` computes z = M r. Convergence is declared once the residual
/// measured in the M norm, sqrt(r^T M r), has dropped by rel_tol. `x` holds the
/// initial guess on entry.
template <typename Scalar, typename ApplyA, typename ApplyM>
MinresReport minres(ApplyA&& apply_a, ApplyM&& apply_m, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b,
                    Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x, const MinresControl& control = {}) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = b.size();
  if (x.size() != n) x = Vector::Zero(n);

  MinresReport report;
  Vector v_prev = Vector::Zero(n);
  Vector v(n), z(n), az(n), w_prev = Vector::Zero(n), w = Vector::Zero(n), w_next(n);

  apply_a(x, az);
  v = b - az;
  apply_m(v, z);
  Scalar gamma = std::sqrt(std::max<Scalar>(v.dot(z), Scalar(0)));
  report.initial_residual = static_cast<double>(gamma);
  if (control.record_history) report.history.push_back(gamma > 0 ? 1.0 : 0.0);
  if (gamma == Scalar(0)) {
    report.converged = true;
    return report;
  }

  const Scalar gamma0 = gamma;
  Scalar gamma_prev = 1;
  Scalar eta = gamma;
  Scalar s_prev = 0, s = 0, c_prev = 1, c = 1;

  for (int j = 1; j <= control.max_iterations; ++j) {
    z /= gamma;
    apply_a(z, az);
    const Scalar delta = az.dot(z);

    Vector v_next = az - (delta / gamma) * v - (gamma / gamma_prev) * v_prev;
    v_prev.swap(v);
    v.swap(v_next);
    Vector z_next(n);
    apply_m(v, z_next);
    const Scalar gamma_next = std::sqrt(std::max<Scalar>(v.dot(z_next), Scalar(0)));

    // Apply the two previous Givens rotations and compute a new one.
    const Scalar alpha0 = c * delta - c_prev * s * gamma;
    const Scalar alpha1 = std::sqrt(alpha0 * alpha0 + gamma_next * gamma_next);
    const Scalar alpha2 = s * delta + c_prev * c * gamma;
    const Scalar alpha3 = s_prev * gamma;
    const Scalar c_next = alpha0 / alpha1;
    const Scalar s_next = gamma_next / alpha1;

    w_next = (z - alpha3 * w_prev - alpha2 * w) / alpha1;
    x += c_next * eta * w_next;
    eta = -s_next * eta;

    w_prev.swap(w);
    w.swap(w_next);
    z.swap(z_next);
    gamma_prev = gamma;
    gamma = gamma_next;
    s_prev = s;
    s = s_next;
    c_prev = c;
    c = c_next;

    report.iterations = j;
    report.relative_residual = static_cast<double>(std::abs(eta) / gamma0);
    if (control.record_history) report.history.push_back(report.relative_residual);
    if (report.relative_residual <= control.rel_tol || gamma == Scalar(0)) {
      report.converged = true;
      break;
    }
  }
  return report;
}

}  // namespace rockperm::stokes
