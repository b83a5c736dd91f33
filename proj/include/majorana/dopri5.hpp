#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include <Eigen/Core>

#include "majorana/errors.hpp"

namespace majorana {

/// Options for the embedded Dormand-Prince 5(4) integrator.
struct Dopri5Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 selects a fraction of the step cap
  long max_steps = 50'000'000;
};

struct Dopri5Stats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evaluations = 0;
};

/// Continuous extension over one accepted step (Hairer & Wanner, 4th order).
template <class State>
struct Dopri5DenseStep {
  double t_begin = 0.0;
  double h = 0.0;
  State r1, r2, r3, r4, r5;

  double t_end() const { return t_begin + h; }

  State operator()(double t) const {
    const double s = (t - t_begin) / h;
    const double s1 = 1.0 - s;
    return r1 + s * (r2 + s1 * (r3 + s * (r4 + s1 * r5)));
  }
};

/// Integrates y' = f(t, y) from t0 to t1 (either direction).
///
/// `step_cap(t)` bounds |h| at the start of each step on top of
/// `options.max_step`. `on_step(dense, y_new)` sees every accepted step.
/// Returns y(t1). Throws StepSizeUnderflow when the step collapses below
/// floating-point resolution of t.
template <class State, class Rhs, class StepCap, class OnStep>
State dopri5_integrate(Rhs&& f, State y, double t0, double t1, const Dopri5Options& options, StepCap&& step_cap,
                       OnStep&& on_step, Dopri5Stats* stats = nullptr) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                   a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                   d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                   d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

  Dopri5Stats local;
  Dopri5Stats& st = stats ? *stats : local;
  if (t1 == t0) return y;

  const double dir = t1 > t0 ? 1.0 : -1.0;
  auto cap_at = [&](double t) {
    return std::min({options.max_step, step_cap(t), std::abs(t1 - t0)});
  };
  double h = options.initial_step > 0 ? options.initial_step : 0.1 * cap_at(t0);
  h = dir * std::min(std::abs(h), cap_at(t0));

  double t = t0;
  State k1 = f(t, y);
  ++st.rhs_evaluations;
  double err_prev = 1e-4;
  bool last_rejected = false;

  while (dir * (t1 - t) > 0) {
    if (st.accepted + st.rejected >= options.max_steps) {
      throw StepSizeUnderflow("dopri5: step budget exhausted at t = " + std::to_string(t), t, h, 0.0);
    }
    const double cap = cap_at(t);
    if (std::abs(h) > cap) h = dir * cap;
    if (dir * (t + h - t1) > 0) h = t1 - t;
    const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), std::abs(h));
    if (std::abs(h) < h_min && dir * (t1 - t) > h_min) {
      throw StepSizeUnderflow("dopri5: step size underflow at t = " + std::to_string(t), t, h, 0.0);
    }

    const State k2 = f(t + c2 * h, State(y + h * (a21 * k1)));
    const State k3 = f(t + c3 * h, State(y + h * (a31 * k1 + a32 * k2)));
    const State k4 = f(t + c4 * h, State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const State k5 = f(t + c5 * h, State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const State k6 = f(t + h, State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    const State y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const State k7 = f(t + h, y_new);
    st.rhs_evaluations += 6;

    const State err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double scale = options.abs_tol + options.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      const double r = std::abs(err_vec[i]) / scale;
      err += r * r;
    }
    err = std::sqrt(err / static_cast<double>(y.size()));

    if (!std::isfinite(err)) {
      ++st.rejected;
      h *= 0.2;
      last_rejected = true;
      continue;
    }

    if (err <= 1.0) {
      Dopri5DenseStep<State> dense;
      dense.t_begin = t;
      dense.h = h;
      dense.r1 = y;
      dense.r2 = y_new - y;
      dense.r3 = h * k1 - dense.r2;
      dense.r4 = dense.r2 - h * k7 - dense.r3;
      dense.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

      // Land exactly on t1 at the final step.
      const double t_next = (dir * (t1 - (t + h)) <= 0) ? t1 : t + h;
      on_step(dense, y_new);
      ++st.accepted;
      y = y_new;
      k1 = k7;
      t = t_next;

      // PI controller (Gustafsson), exponents as in Hairer's DOPRI5.
      const double e = std::max(err, 1e-10);
      double fac = 0.9 * std::pow(e, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
      fac = std::clamp(fac, 0.2, 10.0);
      if (last_rejected) fac = std::min(fac, 1.0);
      err_prev = std::max(err, 1e-4);
      h *= fac;
      last_rejected = false;
    } else {
      ++st.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      last_rejected = true;
    }
  }
  return y;
}

}  // namespace majorana
