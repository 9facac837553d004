#include "rockperm/stokes/permeability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rockperm/errors.hpp"
#include "rockperm/stokes/reference_element.hpp"
#include "rockperm/units.hpp"

namespace rockperm::stokes {

double PermeabilityResult::k_millidarcy() const { return units::m2_to_millidarcy(k_m2); }

PermeabilityResult compute_permeability(const FlowSolution& solution, const StokesSystem& system,
                                        double characteristic_length) {
  const VoxelMesh& mesh = system.mesh;
  const ReferenceElement& ref = reference_element(system.order);
  const double area = mesh.h * mesh.h;
  const int vpc = ref.velocity_nodes;
  const int ppc = ref.pressure_nodes;
  const auto vx = solution.velocity.head(system.velocity_nodes());

  // Pressure basis face integrals for order 1 (trilinear: a quarter of the face each).
  PermeabilityResult r;
  double p_in = 0, p_out = 0, area_in = 0, area_out = 0;
  for (const auto& f : mesh.boundary_faces) {
    if (f.tag == BoundaryTag::wall) continue;
    const auto cell = static_cast<std::size_t>(f.cell);

    double flux = 0;
    const auto vlocal = face_local_nodes(ref.velocity_degree, f.face);
    for (std::size_t a = 0; a < vlocal.size(); ++a)
      flux += ref.face_weights(static_cast<Eigen::Index>(a)) *
              vx(system.velocity_space.cell_nodes[cell * vpc + static_cast<std::size_t>(vlocal[a])]);
    flux *= area;

    double pressure = 0;
    if (system.order == 0) {
      pressure = solution.pressure(f.cell) * area;
    } else {
      for (int local : face_local_nodes(1, f.face))
        pressure += 0.25 * area * solution.pressure(system.pressure_space.cell_nodes[cell * ppc + static_cast<std::size_t>(local)]);
    }

    if (f.tag == BoundaryTag::inflow) {
      r.flux_in -= flux;
      p_in += pressure;
      area_in += area;
    } else {
      r.flux_out += flux;
      p_out += pressure;
      area_out += area;
    }
  }
  if (area_in == 0 || area_out == 0) throw PreconditionError("mesh has no inflow or outflow faces");
  r.pressure_in = p_in / area_in;
  r.pressure_out = p_out / area_out;

  const double drop = r.pressure_out - r.pressure_in;
  const double scale = std::max({std::abs(r.pressure_in), std::abs(r.pressure_out), 1e-300});
  if (std::abs(drop) <= 1e-12 * scale)
    throw DegeneratePressureError("inflow and outflow pressures coincide; permeability undefined");

  r.darcy_number = -r.flux_out / (system.reynolds * drop);
  r.k_m2 = r.darcy_number * characteristic_length * characteristic_length;
  return r;
}

double channel_series(double a, double b, int j_terms) {
  if (!(a > 0 && a < 0.5) || !(b > 0 && b < 0.5))
    throw ArgumentError("channel extents must lie in (0, 1/2)");
  if (j_terms < 1) throw ArgumentError("channel series needs at least one term");
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  const double pi = std::numbers::pi;
  double sum = 0;
  for (int n = 1; n <= j_terms; ++n) {
    const double odd = 2.0 * n - 1.0;
    sum += std::tanh(odd * (pi / 2.0) * (hi / lo)) / std::pow(odd, 5);
  }
  return 1.0 - (192.0 / std::pow(pi, 5)) * (lo / hi) * sum;
}

double channel_series_bound(int j_terms) {
  return 192.0 / (128.0 * std::pow(std::numbers::pi, 5) * std::pow(static_cast<double>(j_terms), 4));
}

double analytic_channel_permeability(double a, double b, int j_terms) {
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  return channel_series(a, b, j_terms) * lo * lo * lo * hi / 12.0;
}

}  // namespace rockperm::stokes
