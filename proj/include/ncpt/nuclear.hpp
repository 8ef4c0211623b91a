#pragma once

#include <optional>
#include <string>

// Three-level nuclear scheme |1> (ground/isomer), |2> (storage), |3> (bridge)
// with radiative multipole transitions |3>->|1> and |3>->|2>.

namespace ncpt {

enum class Multipolarity { electric, magnetic };

// odd double factorial (2L+1)!! used by multipole rate/coupling prefactors
double double_factorial(int n);

// Single-particle (Weisskopf) reference strength in SI:
//   electric: C^2 m^(2L), magnetic: (J/T)^2 m^(2L-2).
// Nuclear radius convention R = 1.2 A^(1/3) fm.
double weisskopf_unit(Multipolarity kind, int order, int mass_number);

// reduced strength in Weisskopf units -> absolute SI strength
double to_absolute(double B_wu, Multipolarity kind, int order, int mass_number);

struct MultipoleTransition {
  Multipolarity kind = Multipolarity::electric;
  int order = 1;       // L >= 1
  double B_wu = 0.0;   // reduced strength, Weisskopf units
  double B_abs = 0.0;  // absolute SI strength (see weisskopf_unit)
  double k = 0.0;      // transition wave number, 1/m

  // Magnetic strengths enter rates and couplings divided by c^2 so both
  // branches share one expression; returns C^2 m^(2L) either way.
  double B_unified() const;
};

// Radiative width of one multipole channel as an energy (J):
//   Gamma = 8 pi (L+1) / (L ((2L+1)!!)^2) * k^(2L+1) * B / (4 pi eps0)
double partial_width(double k, const MultipoleTransition& transition);

struct NuclearSystem {
  std::string name;
  int mass_number = 0;
  double E1 = 0.0, E2 = 0.0, E3 = 0.0;  // level energies, J
  MultipoleTransition t31, t32;
  double Gamma31 = 0.0;  // radiative partial widths, J
  double Gamma32 = 0.0;
  double Gamma3 = 0.0;   // total width of |3>, J (>= Gamma31 + Gamma32)
  double Gamma2 = 0.0;   // width of |2>, J (0 for stable/long-lived storage)

  double E31() const { return E3 - E1; }
  double E32() const { return E3 - E2; }
};

struct TransitionSpec {
  Multipolarity kind = Multipolarity::electric;
  int order = 1;
  double B_wu = 0.0;
};

// Builder input; energies in keV, widths in eV (interfacial units).
struct NuclearConfig {
  std::string name;
  int A = 0;
  double E1_keV = 0.0, E2_keV = 0.0, E3_keV = 0.0;
  TransitionSpec t31, t32;
  std::optional<double> extra_loss_eV;  // non-radiative channels added to Gamma3
  std::optional<double> Gamma3_eV;      // measured total width override
  double Gamma2_eV = 0.0;
};

// Validates ordering E1 < E2 < E3, positive strengths, and the width budget
// (an override below the radiative sum is rejected). Throws std::invalid_argument.
NuclearSystem build_system(const NuclearConfig& config);

// Built-in level schemes; name in {"re185", "tc97", "gd154", "er168"}.
NuclearConfig preset_nucleus(const std::string& name);

}  // namespace ncpt
