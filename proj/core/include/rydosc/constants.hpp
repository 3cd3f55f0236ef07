#pragma once

/// CODATA physical constants (SI units). Kept in one place so the
/// feasibility numbers are reproducible to the digit.
namespace rydosc::constants {

inline constexpr double pi = 3.141592653589793;
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double epsilon0 = 8.854187813e-12;    // F/m
inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double bohr_radius = 5.291772109e-11; // m
inline constexpr double k_boltzmann = 1.380649e-23;    // J/K

/// 4*pi*eps0, the Coulomb-law denominator.
inline constexpr double four_pi_eps0 = 4.0 * pi * epsilon0;

} // namespace rydosc::constants
