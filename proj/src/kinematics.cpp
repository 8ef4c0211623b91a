#include "ncpt/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ncpt/constants.hpp"

namespace ncpt {

using namespace consts;

void validate_pulse(const LaserPulse& pulse) {
  if (!(pulse.E_photon_lab > 0.0))
    throw std::invalid_argument("laser pulse: photon energy must be positive");
  if (pulse.I_peak_lab < 0.0)
    throw std::invalid_argument("laser pulse: peak intensity must be >= 0");
  if (!(pulse.T_lab > 0.0))
    throw std::invalid_argument("laser pulse: duration must be positive");
  if (!(pulse.bandwidth_lab > 0.0))
    throw std::invalid_argument("laser pulse: bandwidth must be positive");
  if (pulse.theta < 0.0 || pulse.theta > std::acos(-1.0))
    throw std::invalid_argument("laser pulse: beam angle must lie in [0, pi]");
}

double lorentz_beta(double gamma) {
  if (gamma < 1.0) throw std::invalid_argument("lorentz_beta: gamma must be >= 1");
  return std::sqrt((gamma - 1.0) * (gamma + 1.0)) / gamma;
}

double doppler_factor(double gamma, double theta) {
  const double beta = lorentz_beta(gamma);
  // 1 - beta computed via the conjugate form; exact at beta -> 1
  const double one_minus_beta = 1.0 / (gamma * gamma * (1.0 + beta));
  return gamma * (one_minus_beta + beta * (1.0 + std::cos(theta)));
}

double solve_gamma(double E_transition, double E_photon) {
  if (!(E_photon > 0.0)) throw std::invalid_argument("solve_gamma: photon energy must be positive");
  const double x = E_transition / E_photon;
  if (!(x > 1.0))
    throw std::domain_error("solve_gamma: transition energy must exceed photon energy");
  return (x * x + 1.0) / (2.0 * x);
}

double solve_stokes_angle(double E32, double E_photon, double gamma) {
  if (!(E32 > 0.0)) throw std::invalid_argument("solve_stokes_angle: E32 must be positive");
  const double beta = lorentz_beta(gamma);
  const double f = E32 / (E_photon * gamma);  // required 1 + beta cos(theta)
  if (f < 1.0 - beta || f > 1.0 + beta)
    throw std::domain_error("solve_stokes_angle: resonance unreachable at this gamma");
  // clamp: at the domain edges (f-1)/beta can land 1 ulp outside [-1, 1]
  return std::acos(std::min(1.0, std::max(-1.0, (f - 1.0) / beta)));
}

double solve_stokes_energy(double E32, double gamma) {
  if (!(E32 > 0.0)) throw std::invalid_argument("solve_stokes_energy: E32 must be positive");
  return E32 / doppler_factor(gamma, 0.0);
}

double detuning(const LaserPulse& pulse, double gamma, double k_transition) {
  const double omega_lab = pulse.E_photon_lab / hbar;
  return doppler_factor(gamma, pulse.theta) * omega_lab - c * k_transition;
}

RestFramePulse to_rest_frame(const LaserPulse& pulse, double gamma) {
  const double D = doppler_factor(gamma, pulse.theta);
  RestFramePulse rest;
  rest.omega = D * pulse.E_photon_lab / hbar;
  rest.bandwidth = D * pulse.bandwidth_lab;
  rest.duration = pulse.T_lab / D;
  rest.intensity = D * D * pulse.I_peak_lab;
  return rest;
}

FrameParams FrameParams::make(double gamma, double theta_stokes) {
  FrameParams f;
  f.gamma = gamma;
  f.beta = lorentz_beta(gamma);
  f.D_pump = doppler_factor(gamma, 0.0);
  f.D_stokes = doppler_factor(gamma, theta_stokes);
  return f;
}

LaserProfile sxfel() { return {"sxfel", 12.4 * keV, 0.1e-12, 10.0 * meV}; }

LaserProfile xfelo() { return {"xfelo", 25.0 * keV, 1.0e-12, 1.0 * meV}; }

LaserProfile laser_by_name(const std::string& name) {
  if (name == "sxfel") return sxfel();
  if (name == "xfelo") return xfelo();
  throw std::invalid_argument("unknown laser profile: " + name);
}

}  // namespace ncpt
