#include "ncpt/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "ncpt/constants.hpp"

namespace ncpt {

using namespace consts;
using std::numbers::pi;

namespace {

// index-addressed work items; assembly order never depends on scheduling
template <typename Fn>
void parallel_for(int n, int workers, Fn&& fn) {
  workers = std::clamp(workers, 1, std::max(n, 1));
  if (workers == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

double max_rest_width(const Setup& s) {
  return std::max(s.laser.T_lab / s.frame.D_pump, s.laser.T_lab / s.frame.D_stokes);
}

}  // namespace

Setup make_setup(const NuclearSystem& system, const LaserProfile& laser, Geometry geometry,
                 double stokes_ratio) {
  if (!(stokes_ratio > 0.0)) throw std::invalid_argument("make_setup: Stokes ratio must be positive");
  Setup s;
  s.system = system;
  s.geometry = geometry;
  s.laser = laser;
  s.stokes_ratio = stokes_ratio;
  const double gamma = solve_gamma(system.E31(), laser.E_photon);
  if (geometry == Geometry::crossed) {
    s.theta_S = solve_stokes_angle(system.E32(), laser.E_photon, gamma);
    s.E_stokes = laser.E_photon;
  } else {
    s.theta_S = 0.0;
    s.E_stokes = solve_stokes_energy(system.E32(), gamma);
  }
  s.frame = FrameParams::make(gamma, s.theta_S);
  return s;
}

double preset_stokes_ratio(const std::string& name, Geometry geometry) {
  const bool crossed = geometry == Geometry::crossed;
  if (name == "re185") return crossed ? 0.02 : 0.03;
  if (name == "tc97") return crossed ? 20.82 : 35.06;
  if (name == "gd154") return crossed ? 0.81 : 0.90;
  if (name == "er168") return crossed ? 0.34 : 0.35;
  throw std::invalid_argument("no tabulated Stokes ratio for preset: " + name);
}

std::pair<LaserPulse, LaserPulse> make_pulses(const Setup& setup, double I_pump, double delay) {
  LaserPulse pump;
  pump.E_photon_lab = setup.laser.E_photon;
  pump.I_peak_lab = I_pump;
  pump.T_lab = setup.laser.T_lab;
  pump.bandwidth_lab = setup.laser.bandwidth;
  pump.theta = 0.0;
  pump.tau_rest = 0.5 * delay;

  LaserPulse stokes = pump;
  stokes.E_photon_lab = setup.E_stokes;
  stokes.I_peak_lab = setup.stokes_ratio * I_pump;
  stokes.theta = setup.theta_S;
  stokes.tau_rest = -0.5 * delay;
  return {pump, stokes};
}

double settled_efficiency(const DensityMatrix& final_state, const NuclearSystem& system) {
  const double rho22 = final_state.population(2);
  if (system.Gamma2 > 0.0 || !(system.Gamma3 > 0.0)) return rho22;
  return rho22 + final_state.population(3) * system.Gamma32 / system.Gamma3;
}

EtaPoint evaluate_point(const Setup& setup, double I_pump, double delay, const ScanOptions& opts,
                        double extra_delta_p, double extra_delta_s, double dtheta,
                        double dgamma_rel) {
  const double gamma = setup.frame.gamma * (1.0 + dgamma_rel);
  const double theta_S = setup.theta_S + dtheta;
  const FrameParams frame = FrameParams::make(gamma, theta_S);

  auto [pump, stokes] = make_pulses(setup, I_pump, delay);
  stokes.theta = theta_S;

  EtaPoint point;
  point.drives = build_drives(setup.system, frame, pump, stokes, opts.convention);
  point.drives.pump.Delta += extra_delta_p;
  point.drives.stokes.Delta += extra_delta_s;

  EvolveOptions eopts;
  eopts.step = opts.step;
  eopts.gamma_dephasing = opts.gamma_dephasing;
  point.summary = evolve_summary(setup.system, point.drives, make_span(point.drives), eopts);
  point.eta = settled_efficiency(point.summary.final_state, setup.system);
  return point;
}

DelayResult optimize_delay(const Setup& setup, double I_pump, const ScanOptions& opts) {
  if (I_pump < 0.0) throw std::invalid_argument("optimize_delay: intensity must be >= 0");
  if (opts.coarse_points < 5)
    throw std::invalid_argument("optimize_delay: coarse grid needs at least 5 points");

  const double width = max_rest_width(setup);
  double window = opts.window_widths * width;

  DelayResult result;
  result.eta = -1.0;
  const auto consider = [&](double delay, const EtaPoint& point) {
    if (point.eta > result.eta) {
      result.eta = point.eta;
      result.delay = delay;
      result.best = point;
    }
  };

  const int n = opts.coarse_points;
  std::vector<double> delays(n);
  int best_index = 0;
  for (int attempt = 0;; ++attempt) {
    result.eta = -1.0;
    for (int i = 0; i < n; ++i) {
      delays[i] = -window + 2.0 * window * i / (n - 1);
      const EtaPoint p = evaluate_point(setup, I_pump, delays[i], opts);
      consider(delays[i], p);
      if (result.delay == delays[i]) best_index = i;
    }
    if (best_index > 0 && best_index < n - 1) break;
    if (attempt >= 3) {
      result.window_exhausted = true;
      break;
    }
    window *= 2.0;
  }

  // golden-section refinement inside the bracket around the best coarse sample
  if (!result.window_exhausted) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = delays[best_index - 1];
    double b = delays[best_index + 1];
    const double resolution = opts.delay_resolution_frac * width;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    EtaPoint p1 = evaluate_point(setup, I_pump, x1, opts);
    EtaPoint p2 = evaluate_point(setup, I_pump, x2, opts);
    consider(x1, p1);
    consider(x2, p2);
    for (int iter = 0; iter < 60 && (b - a) > resolution; ++iter) {
      if (p1.eta < p2.eta) {
        a = x1;
        x1 = x2;
        p1 = p2;
        x2 = a + inv_phi * (b - a);
        p2 = evaluate_point(setup, I_pump, x2, opts);
        consider(x2, p2);
      } else {
        b = x2;
        x2 = x1;
        p2 = p1;
        x1 = b - inv_phi * (b - a);
        p1 = evaluate_point(setup, I_pump, x1, opts);
        consider(x1, p1);
      }
    }
  }
  return result;
}

double pi_pulse_intensity(const NuclearSystem& system, const FrameParams& frame,
                          const LaserPulse& pulse_template, Branch branch) {
  const MultipoleTransition& transition = branch == Branch::pump ? system.t31 : system.t32;
  const double D = doppler_factor(frame.gamma, pulse_template.theta);
  if (!(pulse_template.T_lab > 0.0))
    throw std::invalid_argument("pi_pulse_intensity: pulse duration must be positive");
  if (!(system.Gamma3 > 0.0))
    throw std::domain_error("pi_pulse_intensity: zero nuclear width, penalty not invertible");

  // rest-frame Gaussian area Omega0 sqrt(2 pi) T_lab / D = pi
  const double Omega0 = D * std::sqrt(pi / 2.0) / pulse_template.T_lab;
  const double coupling = rabi_peak(1.0, transition, 1.0);  // Omega per sqrt(W/m^2)
  if (!(coupling > 0.0))
    throw std::domain_error("pi_pulse_intensity: zero coupling strength, not invertible");
  const double I_eff = std::pow(Omega0 / (coupling * D), 2);
  const double penalty =
      std::min(1.0, system.Gamma3 / (D * pulse_template.bandwidth_lab));
  return I_eff / penalty;
}

SweepResult intensity_sweep(const Setup& setup, const SweepGrid& grid, const ScanOptions& opts) {
  if (!(grid.I_min > 0.0) || !(grid.I_max >= grid.I_min))
    throw std::invalid_argument("intensity_sweep: grid needs 0 < I_min <= I_max");
  if (grid.points < 1) throw std::invalid_argument("intensity_sweep: grid needs >= 1 point");

  std::vector<double> intensities(grid.points);
  for (int i = 0; i < grid.points; ++i) {
    const double f = grid.points == 1 ? 0.0 : double(i) / (grid.points - 1);
    intensities[i] = grid.I_min * std::pow(grid.I_max / grid.I_min, f);
  }

  // regime threshold: optima within half a coarse cell of zero delay are
  // neither clean pulse ordering
  const double width = max_rest_width(setup);
  const double mixed_threshold =
      opts.window_widths * width / std::max(1, opts.coarse_points - 1);

  SweepResult result;
  result.rows.resize(grid.points);
  parallel_for(grid.points, opts.workers, [&](int i) {
    SweepRow& row = result.rows[i];
    row.I_pump = intensities[i];
    try {
      const DelayResult opt = optimize_delay(setup, intensities[i], opts);
      row.delay = opt.delay;
      row.eta = opt.eta;
      row.omega_p_peak = opt.best.drives.pump.Omega0;
      row.omega_s_peak = opt.best.drives.stokes.Omega0;
      row.max_rho33 = opt.best.summary.max_rho33;
      // peak of the quadrature drive sum over the pulse window
      double peak = 0.0;
      const TimeSpan span = make_span(opt.best.drives);
      for (int k = 0; k <= 1000; ++k) {
        const double t = span.t0 + (span.t1 - span.t0) * k / 1000.0;
        const double wp = opt.best.drives.pump.amplitude(t);
        const double ws = opt.best.drives.stokes.amplitude(t);
        peak = std::max(peak, std::hypot(wp, ws));
      }
      row.adiabaticity = peak * std::abs(opt.delay);
      if (std::abs(opt.delay) <= mixed_threshold)
        row.regime = "mixed";
      else
        row.regime = opt.delay < 0.0 ? "pi-pulse" : "stirap";
    } catch (const std::exception& err) {
      row.failed = true;
      row.regime = "failed";
      row.eta = std::numeric_limits<double>::quiet_NaN();
      row.error = err.what();
    }
  });

  for (int i = grid.points - 1; i >= 0; --i) {
    const SweepRow& row = result.rows[i];
    if (row.failed || !(row.eta >= 0.99)) break;
    result.plateau_onset = row.I_pump;
  }
  return result;
}

DetuningCurve detuning_robustness(const Setup& setup, double I_pump,
                                  const std::vector<double>& deltas, const ScanOptions& opts) {
  if (deltas.empty()) throw std::invalid_argument("detuning_robustness: empty grid");
  const DelayResult nominal = optimize_delay(setup, I_pump, opts);

  DetuningCurve curve;
  curve.delta = deltas;
  curve.eta.resize(deltas.size());
  curve.delay = nominal.delay;
  curve.eta0 = nominal.eta;
  parallel_for(int(deltas.size()), opts.workers, [&](int i) {
    curve.eta[i] =
        evaluate_point(setup, I_pump, nominal.delay, opts, deltas[i], deltas[i]).eta;
  });
  for (double eta : curve.eta)
    curve.max_drop = std::max(curve.max_drop, (curve.eta0 - eta) / curve.eta0);
  return curve;
}

MismatchSurface mismatch_robustness(const Setup& setup, double I_pump,
                                    const std::vector<double>& dtheta_grid,
                                    const std::vector<double>& dgamma_grid,
                                    const std::vector<double>& multipliers,
                                    const ScanOptions& opts) {
  if (setup.geometry != Geometry::crossed)
    throw std::invalid_argument("mismatch_robustness: requires the crossed-beam setup");
  if (dtheta_grid.empty() || dgamma_grid.empty())
    throw std::invalid_argument("mismatch_robustness: empty grid");

  const DelayResult nominal = optimize_delay(setup, I_pump, opts);

  MismatchSurface surface;
  surface.dtheta = dtheta_grid;
  surface.dgamma = dgamma_grid;
  surface.delay = nominal.delay;

  const int nt = int(dtheta_grid.size());
  const int ng = int(dgamma_grid.size());
  const auto box_min = [&](double multiplier, std::vector<std::vector<double>>* keep) {
    std::vector<std::vector<double>> eta(nt, std::vector<double>(ng, 0.0));
    parallel_for(nt * ng, opts.workers, [&](int cell) {
      const int i = cell / ng;
      const int j = cell % ng;
      eta[i][j] = evaluate_point(setup, multiplier * I_pump, nominal.delay, opts, 0.0, 0.0,
                                 dtheta_grid[i], dgamma_grid[j])
                      .eta;
    });
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& rowvals : eta)
      for (double e : rowvals) lowest = std::min(lowest, e);
    if (keep) *keep = std::move(eta);
    return lowest;
  };

  surface.min_eta = box_min(1.0, &surface.eta);
  surface.ladder.emplace_back(1.0, surface.min_eta);
  if (surface.min_eta >= 0.99) surface.restoring_multiplier = 1.0;

  for (double m : multipliers) {
    if (m == 1.0) continue;
    if (!(m > 0.0)) throw std::invalid_argument("mismatch_robustness: multipliers must be positive");
    const double lowest = box_min(m, nullptr);
    surface.ladder.emplace_back(m, lowest);
    if (!surface.restoring_multiplier && lowest >= 0.99) surface.restoring_multiplier = m;
  }
  return surface;
}

}  // namespace ncpt
