#include "ncpt/nuclear.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ncpt/constants.hpp"

namespace ncpt {

using namespace consts;
using std::numbers::pi;

double double_factorial(int n) {
  if (n < -1) throw std::invalid_argument("double_factorial: n < -1");
  double r = 1.0;
  for (; n > 1; n -= 2) r *= n;
  return r;
}

double weisskopf_unit(Multipolarity kind, int order, int mass_number) {
  if (order < 1) throw std::invalid_argument("weisskopf_unit: multipole order must be >= 1");
  if (mass_number < 1) throw std::invalid_argument("weisskopf_unit: mass number must be >= 1");
  const double L = order;
  const double radius = 1.2 * std::cbrt(double(mass_number)) * fm;  // m
  const double shape = std::pow(3.0 / (L + 3.0), 2);
  if (kind == Multipolarity::electric)
    return (1.0 / (4.0 * pi)) * shape * std::pow(radius, 2 * L) * e_charge * e_charge;
  return (10.0 / pi) * shape * std::pow(radius, 2 * L - 2) * mu_N * mu_N;
}

double to_absolute(double B_wu, Multipolarity kind, int order, int mass_number) {
  return B_wu * weisskopf_unit(kind, order, mass_number);
}

double MultipoleTransition::B_unified() const {
  return kind == Multipolarity::magnetic ? B_abs / (c * c) : B_abs;
}

double partial_width(double k, const MultipoleTransition& transition) {
  if (k <= 0.0) throw std::invalid_argument("partial_width: wave number must be positive");
  const int L = transition.order;
  const double dfact = double_factorial(2 * L + 1);
  const double prefactor = 8.0 * pi * (L + 1) / (L * dfact * dfact);
  return prefactor * std::pow(k, 2 * L + 1) * transition.B_unified() / (4.0 * pi * eps0);
}

static MultipoleTransition make_transition(const TransitionSpec& spec, int A, double energy) {
  if (spec.B_wu <= 0.0) throw std::invalid_argument("transition strength B_wu must be positive");
  MultipoleTransition t;
  t.kind = spec.kind;
  t.order = spec.order;
  t.B_wu = spec.B_wu;
  t.B_abs = to_absolute(spec.B_wu, spec.kind, spec.order, A);
  t.k = wave_number(energy);
  return t;
}

NuclearSystem build_system(const NuclearConfig& config) {
  if (config.A < 1) throw std::invalid_argument("nucleus: mass number must be >= 1");
  if (!(config.E1_keV < config.E2_keV && config.E2_keV < config.E3_keV))
    throw std::invalid_argument("nucleus: level ordering must satisfy E1 < E2 < E3");
  if (config.Gamma2_eV < 0.0) throw std::invalid_argument("nucleus: Gamma2 must be >= 0");

  NuclearSystem sys;
  sys.name = config.name;
  sys.mass_number = config.A;
  sys.E1 = config.E1_keV * keV;
  sys.E2 = config.E2_keV * keV;
  sys.E3 = config.E3_keV * keV;
  sys.t31 = make_transition(config.t31, config.A, sys.E31());
  sys.t32 = make_transition(config.t32, config.A, sys.E32());
  sys.Gamma31 = partial_width(sys.t31.k, sys.t31);
  sys.Gamma32 = partial_width(sys.t32.k, sys.t32);

  const double radiative = sys.Gamma31 + sys.Gamma32;
  sys.Gamma3 = radiative;
  if (config.extra_loss_eV) {
    if (*config.extra_loss_eV < 0.0)
      throw std::invalid_argument("nucleus: extra_loss_eV must be >= 0");
    sys.Gamma3 += *config.extra_loss_eV * eV;
  }
  if (config.Gamma3_eV) {
    const double override_width = *config.Gamma3_eV * eV;
    if (override_width < radiative)
      throw std::invalid_argument(
          "nucleus: Gamma3_eV override is below the radiative sum Gamma31 + Gamma32");
    sys.Gamma3 = override_width;
  }
  sys.Gamma2 = config.Gamma2_eV * eV;
  return sys;
}

NuclearConfig preset_nucleus(const std::string& name) {
  NuclearConfig cfg;
  cfg.name = name;
  if (name == "re185") {
    // 284 keV bridge above the 125 keV storage level of the Re-185 ground band
    cfg.A = 185;
    cfg.E1_keV = 0.0;
    cfg.E2_keV = 125.0;
    cfg.E3_keV = 284.0;
    cfg.t31 = {Multipolarity::electric, 2, 6.4e1};
    cfg.t32 = {Multipolarity::magnetic, 1, 3.7e-1};
  } else if (name == "tc97") {
    // depletion of the 96.57 keV isomer through the 657 keV bridge
    cfg.A = 97;
    cfg.E1_keV = 96.57;
    cfg.E2_keV = 324.0;
    cfg.E3_keV = 657.0;
    cfg.t31 = {Multipolarity::electric, 2, 5.0e2};
    cfg.t32 = {Multipolarity::electric, 1, 6.7e-5};
  } else if (name == "gd154") {
    cfg.A = 154;
    cfg.E1_keV = 0.0;
    cfg.E2_keV = 123.0;
    cfg.E3_keV = 1241.0;
    cfg.t31 = {Multipolarity::electric, 1, 4.4e-2};
    cfg.t32 = {Multipolarity::electric, 1, 4.9e-2};
  } else if (name == "er168") {
    cfg.A = 168;
    cfg.E1_keV = 0.0;
    cfg.E2_keV = 79.0;
    cfg.E3_keV = 1786.0;
    cfg.t31 = {Multipolarity::electric, 1, 3.2e-3};
    cfg.t32 = {Multipolarity::electric, 1, 9.1e-3};
  } else {
    throw std::invalid_argument("unknown nucleus preset: " + name);
  }
  return cfg;
}

}  // namespace ncpt
