#pragma once

#include <string>

// Relativistic beam kinematics: matching lab-frame x-ray pulses to nuclear
// transition energies in the rest frame of an ion moving with Lorentz factor
// gamma. The pump beam is always head-on (theta = 0); the Stokes beam is
// either head-on too (two-color copropagating setup) or tilted by theta_S
// (single-color crossed setup).

namespace ncpt {

enum class Geometry { copropagating, crossed };

struct LaserPulse {
  double E_photon_lab = 0.0;   // J
  double I_peak_lab = 0.0;     // W/m^2, lab-frame peak intensity
  double T_lab = 0.0;          // s, Gaussian duration parameter (lab)
  double bandwidth_lab = 0.0;  // J, lab-frame bandwidth as energy
  double theta = 0.0;          // rad, beam angle to the ion velocity
  double tau_rest = 0.0;       // s, envelope peak time in the nuclear rest frame
};

// throws std::invalid_argument naming the offending field
void validate_pulse(const LaserPulse& pulse);

// beta from gamma without cancellation for gamma near 1
double lorentz_beta(double gamma);

// D = gamma (1 + beta cos theta); evaluated as gamma ((1-beta) + beta (1+cos theta))
// so both terms stay non-negative for any angle.
double doppler_factor(double gamma, double theta);

// Lorentz factor putting a head-on photon of lab energy E_photon on resonance
// with a transition of energy E_transition: gamma = (x^2+1)/(2x), x = E_t/E_ph.
// Requires x > 1 (boost must upshift).
double solve_gamma(double E_transition, double E_photon);

// Stokes beam angle for the crossed setup: gamma (1 + beta cos theta) E_ph = E32.
// Throws std::domain_error when the resonance is geometrically unreachable.
double solve_stokes_angle(double E32, double E_photon, double gamma);

// Lab photon energy of a head-on Stokes beam (copropagating setup).
double solve_stokes_energy(double E32, double gamma);

// Rest-frame detuning in rad/s for a beam against a transition of wave
// number k: Delta = D * omega_lab - c * k.
double detuning(const LaserPulse& pulse, double gamma, double k_transition);

struct RestFramePulse {
  double omega = 0.0;      // rad/s
  double bandwidth = 0.0;  // J
  double duration = 0.0;   // s
  double intensity = 0.0;  // W/m^2
};

// omega -> D omega, bandwidth -> D bandwidth, T -> T/D, I -> D^2 I
RestFramePulse to_rest_frame(const LaserPulse& pulse, double gamma);

struct FrameParams {
  double gamma = 1.0;
  double beta = 0.0;
  double D_pump = 1.0;    // doppler factor of the head-on pump
  double D_stokes = 1.0;  // doppler factor of the Stokes beam

  static FrameParams make(double gamma, double theta_stokes);
};

struct LaserProfile {
  std::string name;
  double E_photon = 0.0;   // J
  double T_lab = 0.0;      // s
  double bandwidth = 0.0;  // J
};

// seeded x-ray FEL: 12.4 keV photons, 0.1 ps pulses, 10 meV bandwidth
LaserProfile sxfel();
// x-ray FEL oscillator: 25 keV photons, 1 ps pulses, 1 meV bandwidth
LaserProfile xfelo();
LaserProfile laser_by_name(const std::string& name);

}  // namespace ncpt
