#pragma once

// Physical constants (CODATA 2018), SI units throughout.

namespace magnoise::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double hbar = 1.054571817e-34;               // J s
inline constexpr double mu_bohr = 9.2740100783e-24;           // J/T
inline constexpr double mu_nuclear = 5.0507837461e-27;        // J/T
inline constexpr double g_electron = 2.00231930436256;        // |g_e|
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg
inline constexpr double mu0 = 1.25663706212e-6;               // N/A^2

// Free-electron spin gyromagnetic ratio, rad s^-1 T^-1 (~ 2pi * 28.02 GHz/T).
inline constexpr double gamma_electron = g_electron * mu_bohr / hbar;

// Bohr-to-nuclear magneton ratio; the ESR-vs-NMR sensitivity factor (~1836.15).
inline constexpr double magneton_ratio = mu_bohr / mu_nuclear;

} // namespace magnoise::constants
