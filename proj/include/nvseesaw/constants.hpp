#pragma once

#include <numbers>

namespace nvseesaw {

inline constexpr double two_pi = 2.0 * std::numbers::pi_v<double>;

/// Fundamental constants in SI units. Treated as immutable after construction;
/// tests may build variants (e.g. gravity = 0) to probe scaling laws.
struct PhysicalConstants {
    double hbar = 1.054571817e-34;        // reduced Planck constant [J s]
    double bohr_magneton = 9.2740100783e-24; // mu_B [J/T]
    double g_factor = 2.0;                // electron spin g-factor, g_S ~= 2
    double gravity = 9.81;                // standard gravity [m/s^2]
};

inline const PhysicalConstants& si_constants() {
    static const PhysicalConstants c{};
    return c;
}

/// NV ground-state zero-field splitting, quoted as omega_0 = 2.88e9 in 1/s.
/// The field bound mu_B B_0 < hbar omega_0 uses this number directly (no 2 pi).
inline constexpr double nv_zero_field_splitting = 2.88e9;

} // namespace nvseesaw
