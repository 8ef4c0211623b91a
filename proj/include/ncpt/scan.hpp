#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ncpt/dynamics.hpp"

// Planning layer: pulse-delay optimization, pi-pulse intensity inversion,
// intensity sweeps with regime labeling, and detuning/mismatch robustness
// scans. Work items are independent and assembled in input order, so results
// do not depend on the worker count.

namespace ncpt {

// One nucleus + laser + geometry resolved into beam parameters.
struct Setup {
  NuclearSystem system;
  FrameParams frame;
  Geometry geometry = Geometry::copropagating;
  LaserProfile laser;
  double E_stokes = 0.0;     // J, lab Stokes photon energy
  double theta_S = 0.0;      // rad
  double stokes_ratio = 1.0; // I_S / I_p
};

Setup make_setup(const NuclearSystem& system, const LaserProfile& laser, Geometry geometry,
                 double stokes_ratio);

// I_S/I_p giving equal pi-pulse intensities on both branches, tabulated per
// preset and geometry.
double preset_stokes_ratio(const std::string& name, Geometry geometry);

// Pump and Stokes pulses for a pump peak intensity (W/m^2) and rest-frame
// delay tau_pump - tau_stokes (positive: Stokes leads, counterintuitive order).
std::pair<LaserPulse, LaserPulse> make_pulses(const Setup& setup, double I_pump, double delay);

struct ScanOptions {
  StepControl step;
  double window_widths = 6.0;          // delay half-window, units of max rest width
  int coarse_points = 61;
  double delay_resolution_frac = 0.01; // golden-section stop, units of max rest width
  int workers = 1;
  IntensityConvention convention = IntensityConvention::strict_eq2;
  double gamma_dephasing = 0.0;        // rad/s
};

// eta of one operating point. Residual bridge population left after the
// pulses settles radiatively with branching Gamma32/Gamma3 into the storage
// level; eta reports that settled value (exact for Gamma2 = 0) so it does not
// depend on the integration-window padding.
struct EtaPoint {
  double eta = 0.0;
  EvolveSummary summary;
  DriveConfig drives;
};

double settled_efficiency(const DensityMatrix& final_state, const NuclearSystem& system);

EtaPoint evaluate_point(const Setup& setup, double I_pump, double delay,
                        const ScanOptions& opts = {}, double extra_delta_p = 0.0,
                        double extra_delta_s = 0.0, double dtheta = 0.0,
                        double dgamma_rel = 0.0);

struct DelayResult {
  double delay = 0.0;  // s, rest frame
  double eta = 0.0;
  bool window_exhausted = false;  // optimum still pinned to the boundary after widening
  EtaPoint best;
};

// Coarse grid over [-W, +W] followed by golden-section refinement around the
// best sample; never returns less than the best coarse eta. A boundary
// optimum retries with a doubled window before setting window_exhausted.
DelayResult optimize_delay(const Setup& setup, double I_pump, const ScanOptions& opts = {});

enum class Branch { pump, stokes };

// Lab-frame peak intensity giving a rest-frame pulse area of pi on one
// branch; inverts the Rabi chain including the bandwidth penalty.
double pi_pulse_intensity(const NuclearSystem& system, const FrameParams& frame,
                          const LaserPulse& pulse_template, Branch branch);

struct SweepRow {
  double I_pump = 0.0;  // W/m^2
  double delay = 0.0;   // s
  double eta = 0.0;
  std::string regime;   // pi-pulse | stirap | mixed | failed
  double omega_p_peak = 0.0;  // rad/s, effective
  double omega_s_peak = 0.0;
  double adiabaticity = 0.0;  // peak sqrt(Wp^2 + Ws^2) * |delay|
  double max_rho33 = 0.0;
  bool failed = false;
  std::string error;
};

struct SweepGrid {
  double I_min = 0.0, I_max = 0.0;  // W/m^2, log-spaced inclusive
  int points = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  // lowest grid intensity with eta >= 0.99 there and at every larger intensity
  std::optional<double> plateau_onset;
};

SweepResult intensity_sweep(const Setup& setup, const SweepGrid& grid,
                            const ScanOptions& opts = {});

struct DetuningCurve {
  std::vector<double> delta;  // rad/s, applied equally to both drives
  std::vector<double> eta;
  double delay = 0.0;         // optimized at delta = 0, then held fixed
  double eta0 = 0.0;
  double max_drop = 0.0;      // max over grid of (eta0 - eta)/eta0
};

DetuningCurve detuning_robustness(const Setup& setup, double I_pump,
                                  const std::vector<double>& deltas,
                                  const ScanOptions& opts = {});

struct MismatchSurface {
  std::vector<double> dtheta;      // rad offsets on the Stokes angle
  std::vector<double> dgamma;      // relative offsets on gamma
  std::vector<std::vector<double>> eta;  // eta[i][j] at (dtheta[i], dgamma[j])
  double delay = 0.0;              // nominal optimum, held fixed over the box
  double min_eta = 0.0;
  // (multiplier, box-minimum eta) for each tried intensity multiplier, and the
  // smallest one restoring min eta >= 0.99 if any did
  std::vector<std::pair<double, double>> ladder;
  std::optional<double> restoring_multiplier;
};

// Crossed-beam only: angle and Lorentz-factor offsets map to unequal drive
// detunings; the box is evaluated at the nominal optimal delay.
MismatchSurface mismatch_robustness(const Setup& setup, double I_pump,
                                    const std::vector<double>& dtheta_grid,
                                    const std::vector<double>& dgamma_grid,
                                    const std::vector<double>& multipliers = {1.0},
                                    const ScanOptions& opts = {});

}  // namespace ncpt
