#pragma once

#include "rockperm/stokes/assembly.hpp"
#include "rockperm/stokes/solver.hpp"

namespace rockperm::stokes {

struct PermeabilityResult {
  double flux_in = 0.0;        // integral of u.n over the inflow face (n = -e_x)
  double flux_out = 0.0;       // Q, integral of u.n over the outflow face
  double pressure_in = 0.0;    // area-averaged
  double pressure_out = 0.0;
  double darcy_number = 0.0;   // dimensionless permeability on the unit cube
  double k_m2 = 0.0;           // darcy_number * L_c^2
  double k_millidarcy() const;
};

/// Area-averaged Darcy estimate: Da = -Q / (Re (P_out - P_in)), k = Da L_c^2.
/// Throws DegeneratePressureError when P_out - P_in vanishes to round-off.
PermeabilityResult compute_permeability(const FlowSolution& solution, const StokesSystem& system,
                                        double characteristic_length);

/// Truncated series factor K_j of the rectangular-duct permeability.
double channel_series(double a, double b, int j_terms);

/// Bound on |K_inf - K_j|: 192 / (128 pi^5 j^4).
double channel_series_bound(int j_terms);

/// Permeability of the duct (0,1) x a x b in unit-cube units: K_j min^3 max / 12.
double analytic_channel_permeability(double a, double b, int j_terms = 10);

}  // namespace rockperm::stokes
