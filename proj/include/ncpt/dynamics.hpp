#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "ncpt/integrator.hpp"
#include "ncpt/kinematics.hpp"
#include "ncpt/nuclear.hpp"

// Density-matrix dynamics of the driven three-level scheme in the nuclear
// rest frame, in the rotating frame of the two drives. Populations on the
// diagonal, p_loss bookkeeping for decay channels leaving the scheme.

namespace ncpt {

struct DensityMatrix {
  Eigen::Matrix3cd rho = Eigen::Matrix3cd::Zero();
  double t = 0.0;
  double p_loss = 0.0;

  static DensityMatrix ground();  // rho = |1><1|

  double population(int level) const;  // level in {1,2,3}
  double trace_defect() const;         // tr(rho) + p_loss - 1
  double hermiticity_defect() const;   // max_ij |rho_ij - conj(rho_ji)|
  double min_eigenvalue() const;       // of the Hermitian part
};

enum class EnvelopeShape { gaussian, flat };

// One rest-frame drive: peak Rabi frequency, peak time, duration T_lab/D,
// detuning. The flat shape is a test hook (constant drive, tau/T ignored).
struct Drive {
  double Omega0 = 0.0;  // rad/s
  double tau = 0.0;     // s
  double T_rest = 0.0;  // s
  double Delta = 0.0;   // rad/s
  EnvelopeShape shape = EnvelopeShape::gaussian;

  double amplitude(double t) const;
};

struct DriveConfig {
  Drive pump, stokes;
};

// Bandwidth penalty: only the spectral fraction within the nuclear width
// drives the transition. I_eff = I_peak * min(1, Gamma_nuc / bandwidth_rest).
double effective_intensity(double I_peak, double Gamma_nuc, double bandwidth_rest);

// Peak Rabi frequency (rad/s) of one multipole channel:
//   Omega0 = (4 sqrt(pi)/hbar) * sqrt(D^2 I_eff (L+1) B / (c eps0 L))
//            * k^(L-1) / (2L+1)!!
// Pass the lab-frame effective intensity together with its Doppler factor, or
// an already boosted rest-frame intensity with D = 1; the two compositions
// are identical because D^2 enters the formula exactly once.
double rabi_peak(double I_eff, const MultipoleTransition& transition, double doppler = 1.0);

// Gaussian drive envelope Omega0 * exp(-[D (t - tau) / (sqrt(2) T_lab)]^2)
// with t and tau in rest-frame time.
double rabi_envelope(double t, double Omega0, double tau, double T_lab, double D);

enum class IntensityConvention { strict_eq2, rest_frame };

// Lab pulses + frame -> rest-frame drives (Rabi peaks, durations, detunings).
// The Doppler factor of each beam is derived from frame.gamma and the beam's
// own angle. Gamma3 of the system sets the bandwidth penalty for both beams.
DriveConfig build_drives(const NuclearSystem& system, const FrameParams& frame,
                         const LaserPulse& pump, const LaserPulse& stokes,
                         IntensityConvention convention = IntensityConvention::strict_eq2);

// Two-drive Hamiltonian in units of hbar (entries in rad/s), basis |1>,|2>,|3>:
//   H/hbar = -(1/2) [ [0, 0, Wp], [0, 2(Dp-Ds), Ws], [Wp, Ws, 2Dp] ]
Eigen::Matrix3cd hamiltonian(double t, const DriveConfig& drives);

struct Relaxation {
  Eigen::Matrix3cd drho = Eigen::Matrix3cd::Zero();
  double dp_loss = 0.0;
};

// Radiative relaxation: |3> decays at Gamma3/hbar with radiative feeding of
// |1> and |2>, |2> decays at Gamma2/hbar into p_loss; coherences damp at the
// half-sums. gamma_dephasing (rad/s) adds laser-linewidth dephasing to all
// coherences; zero in the pure radiative model.
Relaxation relaxation(const Eigen::Matrix3cd& rho, const NuclearSystem& system,
                      double gamma_dephasing = 0.0);

struct TimeSpan {
  double t0 = 0.0, t1 = 0.0;
};

// Smallest span covering every active Gaussian drive peak by pad_widths
// durations on both sides.
TimeSpan make_span(const DriveConfig& drives, double pad_widths = 6.0);

struct EvolveOptions {
  StepControl step;
  bool check_invariants = true;
  double herm_tol = 1e-8;
  double trace_tol = 1e-6;
  double eig_floor = -1e-8;
  double gamma_dephasing = 0.0;  // rad/s
};

struct Trajectory {
  std::vector<DensityMatrix> points;  // one per accepted step
  IntegrationStats stats;

  const DensityMatrix& final_state() const { return points.back(); }
};

struct EvolveSummary {
  DensityMatrix final_state;
  double max_rho33 = 0.0;       // sampled at accepted steps
  double max_herm_defect = 0.0;
  double max_trace_defect = 0.0;
  double min_eig = 0.0;
  IntegrationStats stats;
};

// Integrate d rho/dt = -i [H/hbar, rho] + relaxation from rho(t0) = |1><1|.
// Invariants (Hermiticity, trace + p_loss, positivity) are checked at every
// accepted step when enabled; a breach aborts with an IntegrationError that
// carries the failure time.
Trajectory evolve(const NuclearSystem& system, const DriveConfig& drives, TimeSpan span,
                  const EvolveOptions& opts = {});
EvolveSummary evolve_summary(const NuclearSystem& system, const DriveConfig& drives, TimeSpan span,
                             const EvolveOptions& opts = {});

// Lab-frame entry point; requires span to cover every active pulse peak by
// at least 4 rest-frame widths.
Trajectory evolve(const NuclearSystem& system, const FrameParams& frame, const LaserPulse& pump,
                  const LaserPulse& stokes, TimeSpan span, const EvolveOptions& opts = {},
                  IntensityConvention convention = IntensityConvention::strict_eq2);

// Final population of the storage level |2>.
double transfer_efficiency(const Trajectory& trajectory);

}  // namespace ncpt
