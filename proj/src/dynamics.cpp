#include "ncpt/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ncpt/constants.hpp"

namespace ncpt {

using namespace consts;
using std::numbers::pi;
using Complex = std::complex<double>;

DensityMatrix DensityMatrix::ground() {
  DensityMatrix dm;
  dm.rho(0, 0) = 1.0;
  return dm;
}

double DensityMatrix::population(int level) const {
  if (level < 1 || level > 3) throw std::invalid_argument("population: level must be 1, 2 or 3");
  return rho(level - 1, level - 1).real();
}

double DensityMatrix::trace_defect() const { return rho.trace().real() + p_loss - 1.0; }

double DensityMatrix::hermiticity_defect() const {
  double m = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m = std::max(m, std::abs(rho(i, j) - std::conj(rho(j, i))));
  return m;
}

double DensityMatrix::min_eigenvalue() const {
  const Eigen::Matrix3cd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver;
  solver.computeDirect(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double Drive::amplitude(double t) const {
  if (Omega0 == 0.0) return 0.0;  // inactive drive; T_rest may be unset
  if (shape == EnvelopeShape::flat) return Omega0;
  const double z = (t - tau) / (std::sqrt(2.0) * T_rest);
  return Omega0 * std::exp(-z * z);
}

double effective_intensity(double I_peak, double Gamma_nuc, double bandwidth_rest) {
  if (I_peak < 0.0) throw std::invalid_argument("effective_intensity: intensity must be >= 0");
  if (!(bandwidth_rest > 0.0))
    throw std::invalid_argument("effective_intensity: bandwidth must be positive");
  if (Gamma_nuc < 0.0) throw std::invalid_argument("effective_intensity: width must be >= 0");
  return I_peak * std::min(1.0, Gamma_nuc / bandwidth_rest);
}

double rabi_peak(double I_eff, const MultipoleTransition& transition, double doppler) {
  if (I_eff < 0.0) throw std::invalid_argument("rabi_peak: intensity must be >= 0");
  if (!(doppler > 0.0)) throw std::invalid_argument("rabi_peak: Doppler factor must be positive");
  const int L = transition.order;
  const double core =
      doppler * doppler * I_eff * (L + 1) * transition.B_unified() / (c * eps0 * L);
  return (4.0 * std::sqrt(pi) / hbar) * std::sqrt(core) * std::pow(transition.k, L - 1) /
         double_factorial(2 * L + 1);
}

double rabi_envelope(double t, double Omega0, double tau, double T_lab, double D) {
  const double z = D * (t - tau) / (std::sqrt(2.0) * T_lab);
  return Omega0 * std::exp(-z * z);
}

static Drive build_one_drive(const NuclearSystem& system, double gamma, const LaserPulse& pulse,
                             const MultipoleTransition& transition,
                             IntensityConvention convention) {
  validate_pulse(pulse);
  const double D = doppler_factor(gamma, pulse.theta);
  Drive d;
  if (convention == IntensityConvention::strict_eq2) {
    const double I_eff = effective_intensity(pulse.I_peak_lab, system.Gamma3,
                                             D * pulse.bandwidth_lab);
    d.Omega0 = rabi_peak(I_eff, transition, D);
  } else {
    const RestFramePulse rest = to_rest_frame(pulse, gamma);
    const double I_eff = effective_intensity(rest.intensity, system.Gamma3, rest.bandwidth);
    d.Omega0 = rabi_peak(I_eff, transition, 1.0);
  }
  d.tau = pulse.tau_rest;
  d.T_rest = pulse.T_lab / D;
  d.Delta = detuning(pulse, gamma, transition.k);
  return d;
}

DriveConfig build_drives(const NuclearSystem& system, const FrameParams& frame,
                         const LaserPulse& pump, const LaserPulse& stokes,
                         IntensityConvention convention) {
  DriveConfig drives;
  drives.pump = build_one_drive(system, frame.gamma, pump, system.t31, convention);
  drives.stokes = build_one_drive(system, frame.gamma, stokes, system.t32, convention);
  return drives;
}

Eigen::Matrix3cd hamiltonian(double t, const DriveConfig& drives) {
  const double Wp = drives.pump.amplitude(t);
  const double Ws = drives.stokes.amplitude(t);
  const double Dp = drives.pump.Delta;
  const double Ds = drives.stokes.Delta;
  Eigen::Matrix3cd H = Eigen::Matrix3cd::Zero();
  H(1, 1) = -(Dp - Ds);
  H(2, 2) = -Dp;
  H(0, 2) = -0.5 * Wp;
  H(2, 0) = -0.5 * Wp;
  H(1, 2) = -0.5 * Ws;
  H(2, 1) = -0.5 * Ws;
  return H;
}

Relaxation relaxation(const Eigen::Matrix3cd& rho, const NuclearSystem& system,
                      double gamma_dephasing) {
  const double g3 = rate_of_width(system.Gamma3);
  const double g31 = rate_of_width(system.Gamma31);
  const double g32 = rate_of_width(system.Gamma32);
  const double g2 = rate_of_width(system.Gamma2);
  const double gd = gamma_dephasing;

  Relaxation r;
  r.drho(0, 0) = g31 * rho(2, 2);
  r.drho(1, 1) = g32 * rho(2, 2) - g2 * rho(1, 1);
  r.drho(2, 2) = -g3 * rho(2, 2);
  r.drho(0, 1) = -(0.5 * g2 + gd) * rho(0, 1);
  r.drho(1, 0) = -(0.5 * g2 + gd) * rho(1, 0);
  r.drho(0, 2) = -(0.5 * g3 + gd) * rho(0, 2);
  r.drho(2, 0) = -(0.5 * g3 + gd) * rho(2, 0);
  r.drho(1, 2) = -(0.5 * (g3 + g2) + gd) * rho(1, 2);
  r.drho(2, 1) = -(0.5 * (g3 + g2) + gd) * rho(2, 1);
  r.dp_loss = (g3 - g31 - g32) * rho(2, 2).real() + g2 * rho(1, 1).real();
  return r;
}

TimeSpan make_span(const DriveConfig& drives, double pad_widths) {
  TimeSpan span{0.0, 0.0};
  bool first = true;
  for (const Drive* d : {&drives.pump, &drives.stokes}) {
    if (!(d->T_rest > 0.0) || d->shape != EnvelopeShape::gaussian) continue;
    const double lo = d->tau - pad_widths * d->T_rest;
    const double hi = d->tau + pad_widths * d->T_rest;
    span.t0 = first ? lo : std::min(span.t0, lo);
    span.t1 = first ? hi : std::max(span.t1, hi);
    first = false;
  }
  if (first) throw std::invalid_argument("make_span: no active Gaussian drive");
  return span;
}

using BlochVec = Eigen::Matrix<Complex, 10, 1>;

static BlochVec pack(const Eigen::Matrix3cd& rho, double p_loss) {
  BlochVec y;
  Eigen::Map<Eigen::Matrix3cd>(y.data()) = rho;
  y[9] = p_loss;
  return y;
}

static DensityMatrix unpack(double t, const BlochVec& y) {
  DensityMatrix dm;
  dm.rho = Eigen::Map<const Eigen::Matrix3cd>(y.data());
  dm.t = t;
  dm.p_loss = y[9].real();
  return dm;
}

template <typename Observer>
static IntegrationStats evolve_core(const NuclearSystem& system, const DriveConfig& drives,
                                    TimeSpan span, const EvolveOptions& opts,
                                    Observer&& observe) {
  if (!(span.t1 > span.t0)) throw std::invalid_argument("evolve: empty time span");
  for (const Drive* d : {&drives.pump, &drives.stokes})
    if (d->Omega0 != 0.0 && d->shape == EnvelopeShape::gaussian && !(d->T_rest > 0.0))
      throw std::invalid_argument("evolve: active Gaussian drive needs a positive duration");

  const Complex minus_i(0.0, -1.0);
  const auto rhs = [&](double t, const BlochVec& y) -> BlochVec {
    const Eigen::Map<const Eigen::Matrix3cd> rho(y.data());
    const Eigen::Matrix3cd H = hamiltonian(t, drives);
    const Relaxation relax = relaxation(rho, system, opts.gamma_dephasing);
    BlochVec dy;
    Eigen::Map<Eigen::Matrix3cd>(dy.data()) = minus_i * (H * rho - rho * H) + relax.drho;
    dy[9] = relax.dp_loss;
    return dy;
  };

  BlochVec y = pack(DensityMatrix::ground().rho, 0.0);

  const auto step_observer = [&](double t, const BlochVec& state) {
    DensityMatrix dm = unpack(t, state);
    if (opts.check_invariants) {
      const double herm = dm.hermiticity_defect();
      const double trace = std::abs(dm.trace_defect());
      const double eig = dm.min_eigenvalue();
      // negated comparisons so a non-finite state counts as a breach too
      if (!(herm <= opts.herm_tol) || !(trace <= opts.trace_tol) || !(eig >= opts.eig_floor)) {
        std::ostringstream msg;
        msg << "evolve: invariant breach at t=" << t << " (hermiticity=" << herm
            << ", trace_defect=" << trace << ", min_eig=" << eig << ")";
        throw IntegrationError(msg.str(), t);
      }
    }
    observe(dm);
  };

  return integrate(rhs, y, span.t0, span.t1, opts.step, step_observer);
}

Trajectory evolve(const NuclearSystem& system, const DriveConfig& drives, TimeSpan span,
                  const EvolveOptions& opts) {
  Trajectory traj;
  traj.stats = evolve_core(system, drives, span, opts,
                           [&](const DensityMatrix& dm) { traj.points.push_back(dm); });
  return traj;
}

EvolveSummary evolve_summary(const NuclearSystem& system, const DriveConfig& drives, TimeSpan span,
                             const EvolveOptions& opts) {
  EvolveSummary result;
  result.min_eig = 1.0;
  result.stats = evolve_core(system, drives, span, opts, [&](const DensityMatrix& dm) {
    result.final_state = dm;
    result.max_rho33 = std::max(result.max_rho33, dm.population(3));
    result.max_herm_defect = std::max(result.max_herm_defect, dm.hermiticity_defect());
    result.max_trace_defect = std::max(result.max_trace_defect, std::abs(dm.trace_defect()));
    result.min_eig = std::min(result.min_eig, dm.min_eigenvalue());
  });
  return result;
}

Trajectory evolve(const NuclearSystem& system, const FrameParams& frame, const LaserPulse& pump,
                  const LaserPulse& stokes, TimeSpan span, const EvolveOptions& opts,
                  IntensityConvention convention) {
  const DriveConfig drives = build_drives(system, frame, pump, stokes, convention);
  for (const Drive* d : {&drives.pump, &drives.stokes}) {
    if (d->Omega0 <= 0.0) continue;
    if (span.t0 > d->tau - 4.0 * d->T_rest || span.t1 < d->tau + 4.0 * d->T_rest)
      throw std::invalid_argument(
          "evolve: span must cover every active pulse peak by >= 4 rest-frame widths");
  }
  return evolve(system, drives, span, opts);
}

double transfer_efficiency(const Trajectory& trajectory) {
  if (trajectory.points.empty()) throw std::invalid_argument("transfer_efficiency: empty trajectory");
  return trajectory.final_state().population(2);
}

}  // namespace ncpt
