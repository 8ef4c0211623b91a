#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

// Adaptive Dormand-Prince 5(4) with per-step error control on the max-norm
// of the state. Explicit and non-stiff by design; when the controller drives
// the step below the resolvable floor the run aborts with the failure time
// instead of silently grinding.

namespace ncpt {

struct StepControl {
  double rtol = 1e-9;
  double atol = 1e-14;
  std::optional<double> fixed_step;  // disables adaptivity when set
  double h_init = 0.0;               // 0 -> automatic
  long max_steps = 2'000'000;
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t) : std::runtime_error(what), t_fail(t) {}
  double t_fail;
};

struct IntegrationStats {
  long n_accepted = 0;
  long n_rejected = 0;
  double err_accum = 0.0;  // sum of accepted-step embedded error estimates (max-norm)
};

namespace dp5 {
// Dormand & Prince RK5(4)7M coefficients
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// embedded 4th-order error weights (b - bhat)
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace dp5

// State: Eigen fixed-size vector (real or complex). RHS: f(t, y) -> dy/dt.
// Observer: called as observer(t, y) after the initial point and every
// accepted step.
template <typename State, typename Rhs, typename Observer>
IntegrationStats integrate(Rhs&& f, State& y, double t0, double t1, const StepControl& ctrl,
                           Observer&& observer) {
  if (!(t1 > t0)) throw std::invalid_argument("integrate: time span must be forward");

  const double span = t1 - t0;
  const auto err_norm = [](const State& v) {
    double m = 0.0;
    for (int i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
    return m;
  };

  double t = t0;
  State k1 = f(t, y);
  observer(t, y);

  double h;
  if (ctrl.fixed_step) {
    h = *ctrl.fixed_step;
    if (!(h > 0.0)) throw std::invalid_argument("integrate: fixed step must be positive");
  } else if (ctrl.h_init > 0.0) {
    h = ctrl.h_init;
  } else {
    // modest first guess from the initial slope; the controller corrects fast
    const double d0 = std::max(err_norm(y), 1e-8);
    const double d1 = err_norm(k1);
    h = d1 > 0.0 ? 0.01 * d0 / d1 : span * 1e-6;
    h = std::min(h, span);
  }

  IntegrationStats stats;
  const double h_floor = span * 1e-14;

  for (long step = 0; step < ctrl.max_steps; ++step) {
    if (t >= t1) return stats;
    bool last = false;
    if (t + h >= t1) {
      h = t1 - t;
      last = true;
    }

    using namespace dp5;
    const State k2 = f(t + c2 * h, (y + h * (a21 * k1)).eval());
    const State k3 = f(t + c3 * h, (y + h * (a31 * k1 + a32 * k2)).eval());
    const State k4 = f(t + c4 * h, (y + h * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
    const State k5 = f(t + c5 * h, (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
    const State k6 =
        f(t + h, (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
    const State y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State k7 = f(t + h, y_new);  // FSAL
    const State err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    if (ctrl.fixed_step) {
      t = last ? t1 : t + h;
      y = y_new;
      k1 = k7;
      ++stats.n_accepted;
      stats.err_accum += err_norm(err_vec);
      observer(t, y);
      continue;
    }

    // scaled max-norm error: ||err_i / (atol + rtol * max(|y_i|, |y_new_i|))||_inf
    double err = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      const double scale = ctrl.atol + ctrl.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err = std::max(err, std::abs(err_vec[i]) / scale);
    }

    if (err <= 1.0) {
      t = last ? t1 : t + h;
      y = y_new;
      k1 = k7;
      ++stats.n_accepted;
      stats.err_accum += err_norm(err_vec);
      observer(t, y);
    } else {
      ++stats.n_rejected;
    }

    const double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
    if (h < h_floor)
      throw IntegrationError("integrate: step size underflow (stiff problem?)", t);
  }
  throw IntegrationError("integrate: step budget exhausted", t);
}

}  // namespace ncpt
