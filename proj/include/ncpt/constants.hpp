#pragma once

// Physical constants (CODATA 2018) and unit helpers. All internal arithmetic
// is SI; energies cross module boundaries in eV/keV and are converted here.

namespace ncpt::consts {

inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double c = 2.99792458e8;            // m/s
inline constexpr double eps0 = 8.8541878128e-12;     // F/m
inline constexpr double e_charge = 1.602176634e-19;  // C
inline constexpr double mu_N = 5.0507837461e-27;     // J/T, nuclear magneton

inline constexpr double eV = e_charge;               // J
inline constexpr double keV = 1e3 * eV;
inline constexpr double meV = 1e-3 * eV;
inline constexpr double fm = 1e-15;                  // m
inline constexpr double hbar_c = hbar * c;           // J m

// Beam intensities are quoted in W/cm^2 at the interfaces.
inline constexpr double Wcm2 = 1e4;                  // W/m^2

inline constexpr double to_eV(double joule) { return joule / eV; }
inline constexpr double to_keV(double joule) { return joule / keV; }

// photon energy (J) -> vacuum wave number (1/m)
inline constexpr double wave_number(double energy) { return energy / hbar_c; }

// energy width (J) -> decay rate (1/s)
inline constexpr double rate_of_width(double width) { return width / hbar; }

}  // namespace ncpt::consts
