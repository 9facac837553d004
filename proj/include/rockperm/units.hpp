#pragma once

namespace rockperm::units {

inline constexpr double darcy_in_m2 = 9.869233e-13;
inline constexpr double millidarcy_in_m2 = darcy_in_m2 * 1e-3;

constexpr double m2_to_millidarcy(double k) { return k / millidarcy_in_m2; }
constexpr double millidarcy_to_m2(double k) { return k * millidarcy_in_m2; }
constexpr double millidarcy_to_darcy(double k) { return k * 1e-3; }
constexpr double darcy_to_millidarcy(double k) { return k * 1e3; }

}  // namespace rockperm::units
