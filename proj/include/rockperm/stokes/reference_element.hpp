#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace rockperm::stokes {

/// Gauss-Legendre rule mapped to [0, 1].
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n_points);

/// Equispaced 1D Lagrange basis of degree q on [0, 1]; i in [0, q].
double lagrange(int q, int i, double x);
double lagrange_derivative(int q, int i, double x);

/// Element matrices of the Q_{order+1}^3 / Q_order pair on the unit cube.
/// Local nodes are lexicographic with x fastest. On a cube of edge h the
/// physical matrices are stiffness*h, divergence*h^2, pressure_mass*h^3 and
/// face_weights*h^2.
struct ReferenceElement {
  int order = 1;             // pressure degree
  int velocity_degree = 2;   // order + 1
  int velocity_nodes = 27;   // (velocity_degree+1)^3
  int pressure_nodes = 8;    // (order+1)^3

  Eigen::MatrixXd stiffness;                  // int grad(phi_i) . grad(phi_j)
  std::array<Eigen::MatrixXd, 3> divergence;  // -int psi_k d(phi_j)/dx_c
  Eigen::MatrixXd pressure_mass;              // int psi_k psi_l
  Eigen::VectorXd face_weights;               // int phi over one face, face-local lexicographic order
};

/// order must be 0 or 1. Quadrature uses order+2 points per direction.
const ReferenceElement& reference_element(int order);

}  // namespace rockperm::stokes
