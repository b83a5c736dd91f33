#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "majorana/dopri5.hpp"
#include "majorana/errors.hpp"
#include "majorana/field_model.hpp"
#include "majorana/spin_state.hpp"
#include "majorana/spin_system.hpp"

namespace majorana {

enum class MeasurementBasis { LabZ, FieldAligned };

/// Adiabaticity ratio f_Lar / f_Rot enforced at both ends of the default window.
inline constexpr double kDefaultAdiabaticity = 1e4;

struct PropagationSettings {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  double t_start = 0.0;  // s
  double t_end = 0.0;    // s
  double max_step = std::numeric_limits<double>::infinity();  // s
  MeasurementBasis basis_out = MeasurementBasis::FieldAligned;
  /// Steps never exceed 1 / (larmor_steps * f_Lar(t)).
  double larmor_steps = 50.0;

  void validate_tolerances() const {
    auto ok = [](double tol) { return tol > 0.0 && tol <= 1e-3; };
    if (!ok(rel_tol) || !ok(abs_tol)) throw DomainError("PropagationSettings: tolerances must lie in (0, 1e-3]");
    if (!std::isfinite(t_start) || !std::isfinite(t_end)) throw DomainError("PropagationSettings: non-finite window");
    if (!(max_step > 0)) throw DomainError("PropagationSettings: max_step must be positive");
  }

  /// A non-empty window must bracket the reversal when there is one.
  void validate(const FieldModel& model) const {
    validate_tolerances();
    if (t_end < t_start) throw DomainError("PropagationSettings: t_end < t_start");
    if (t_end > t_start && has_reversal(model)) {
      const double t_star = reversal_time(model);
      if (!(t_start < t_star && t_star < t_end)) {
        throw DomainError("PropagationSettings: window [" + std::to_string(t_start) + ", " + std::to_string(t_end) +
                          "] does not contain the reversal at " + std::to_string(t_star));
      }
    }
  }
};

struct PropagationDiagnostics {
  double worst_norm_drift = 0.0;
  long accepted_steps = 0;
  long rejected_steps = 0;
};

struct PropagationResult {
  SpinState state;  // renormalized
  PropagationDiagnostics diagnostics;
};

struct PopulationResult {
  RVector populations;
  PropagationDiagnostics diagnostics;
};

struct TimeTrace {
  std::vector<double> times;
  RMatrix populations;  // rows: samples, columns: m = +J..-J
  std::vector<FieldVector> field_snapshots;
  MeasurementBasis basis = MeasurementBasis::LabZ;
  PropagationDiagnostics diagnostics;
};

using FieldFunction = std::function<FieldVector(double)>;

/// Spin Hamiltonian g mu_B F.B in joules (F in units of hbar).
inline CMatrix hamiltonian(const SpinSystem& sys, const FieldVector& b) {
  const AngularMomentumOps f = angular_momentum_ops(sys);
  return sys.g_factor * sys.mu_B * (b.x() * f.x + b.y() * f.y + b.z() * f.z);
}

/// Columns are the eigenvectors of n.F for n = B/|B|, ordered m = +J..-J.
/// A vanishing field yields the lab basis.
inline CMatrix field_aligned_basis(const SpinSystem& sys, const FieldVector& b) {
  const double mag = b.norm();
  const int n = sys.dimension();
  if (!(mag > 0)) return CMatrix::Identity(n, n);
  const AngularMomentumOps f = angular_momentum_ops(sys);
  const CMatrix projection = (b.x() * f.x + b.y() * f.y + b.z() * f.z) / mag;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(projection);
  // Eigenvalues come back ascending; reverse to descending m.
  return solver.eigenvectors().rowwise().reverse();
}

inline RVector measure(const SpinSystem& sys, const CVector& c, const FieldVector& b, MeasurementBasis basis) {
  if (basis == MeasurementBasis::LabZ) return c.cwiseAbs2();
  return (field_aligned_basis(sys, b).adjoint() * c).cwiseAbs2();
}

namespace detail {

/// dc/dt = -i (H/hbar) c for a time-dependent field.
class SchrodingerRhs {
 public:
  SchrodingerRhs(const SpinSystem& sys, FieldFunction field) : field_(std::move(field)) {
    const AngularMomentumOps f = angular_momentum_ops(sys);
    const double gamma = sys.gyromagnetic_ratio();
    fx_ = cplx(0.0, -gamma) * f.x;
    fy_ = cplx(0.0, -gamma) * f.y;
    fz_ = cplx(0.0, -gamma) * f.z;
  }

  CVector operator()(double t, const CVector& c) const {
    const FieldVector b = field_(t);
    CVector out = b.y() * (fy_ * c) + b.z() * (fz_ * c);
    if (b.x() != 0.0) out += b.x() * (fx_ * c);
    return out;
  }

  const FieldFunction& field() const { return field_; }

 private:
  FieldFunction field_;
  CMatrix fx_, fy_, fz_;
};

inline FieldFunction as_function(const FieldModel& model) {
  return [model](double t) { return field_at(model, t); };
}

template <class OnStep>
CVector integrate(const SpinSystem& sys, const FieldFunction& field, const CVector& c0, double t0, double t1,
                  const PropagationSettings& settings, PropagationDiagnostics& diag, OnStep&& on_step) {
  settings.validate_tolerances();
  const SchrodingerRhs rhs(sys, field);
  const double omega_per_tesla = std::abs(sys.gyromagnetic_ratio());
  auto step_cap = [&](double t) {
    const double b = field(t).norm();
    if (!(b > 0) || omega_per_tesla == 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 * constants::pi / (settings.larmor_steps * omega_per_tesla * b);
  };
  Dopri5Options opts;
  opts.rel_tol = settings.rel_tol;
  opts.abs_tol = settings.abs_tol;
  opts.max_step = settings.max_step;
  Dopri5Stats stats;
  double worst = std::abs(c0.squaredNorm() - 1.0);
  CVector out;
  try {
    out = dopri5_integrate(
        rhs, c0, t0, t1, opts, step_cap,
        [&](const Dopri5DenseStep<CVector>& dense, const CVector& y_new) {
          worst = std::max(worst, std::abs(y_new.squaredNorm() - 1.0));
          on_step(dense, y_new);
        },
        &stats);
  } catch (const StepSizeUnderflow& e) {
    throw StepSizeUnderflow(std::string(e.what()) + "; worst norm drift " + std::to_string(worst), e.time(), e.step(),
                            worst);
  }
  diag.worst_norm_drift = std::max(diag.worst_norm_drift, worst);
  diag.accepted_steps += stats.accepted;
  diag.rejected_steps += stats.rejected;
  return out;
}

}  // namespace detail

/// Integrates i hbar dc/dt = H(t) c from state.time to `t_final`. The norm is
/// not corrected during integration; its worst excursion is reported and the
/// returned state is renormalized.
inline PropagationResult propagate(const SpinSystem& sys, const FieldFunction& field, const SpinState& state,
                                   double t_final, const PropagationSettings& settings) {
  PropagationDiagnostics diag;
  CVector c = detail::integrate(sys, field, state.amplitudes, state.time, t_final, settings, diag,
                                [](const auto&, const auto&) {});
  c /= c.norm();
  return {SpinState(std::move(c), t_final), diag};
}

/// Propagates over [settings.t_start, settings.t_end]; the state's own time
/// stamp is replaced by settings.t_start.
inline PropagationResult propagate(const SpinSystem& sys, const FieldModel& model, const SpinState& state,
                                   const PropagationSettings& settings) {
  SpinState start = state;
  start.time = settings.t_start;
  return propagate(sys, detail::as_function(model), start, settings.t_end, settings);
}

/// Window [t* - T, t* + T] whose ends satisfy f_Lar >= ratio * f_Rot.
///
/// Linearized ramps are symmetric about t* and T follows in closed form.
/// Exponential ramps start at t = 0 at the earliest and the end is found by
/// doubling the distance from t*.
inline PropagationSettings default_settings(const SpinSystem& sys, const FieldModel& model,
                                            double ratio = kDefaultAdiabaticity) {
  PropagationSettings s;
  const double t_star = reversal_time(model);
  const double a_y = model.A_y();
  const double gamma = std::abs(sys.gyromagnetic_ratio());
  if (model.mode == FieldMode::Linearized) {
    const double c_z = model.C_z();
    // f_Lar / f_Rot = gamma |B|^3 / (C_z A_y)
    const double b_needed = std::cbrt(ratio * c_z * a_y / gamma);
    const double bz = std::sqrt(std::max(b_needed * b_needed - a_y * a_y, 0.0));
    const double half_width = std::max(bz / c_z, 4.0 * a_y / c_z);
    s.t_start = t_star - half_width;
    s.t_end = t_star + half_width;
    return s;
  }
  auto adiabatic = [&](double t) {
    const double f_rot = rotation_frequency(model, t);
    return larmor_frequency(sys, model, t) >= ratio * f_rot;
  };
  double scale = std::min(model.tau_i, t_star);
  double dt = 0.01 * scale;
  s.t_start = 0.0;
  while (dt < t_star) {
    if (adiabatic(t_star - dt)) {
      s.t_start = t_star - dt;
      break;
    }
    dt *= 1.5;
  }
  dt = 0.01 * scale;
  s.t_end = t_star + dt;
  for (int i = 0; i < 200 && !adiabatic(s.t_end); ++i) {
    dt *= 1.5;
    s.t_end = t_star + dt;
  }
  return s;
}

namespace detail {

inline CVector prepare(const SpinSystem& sys, const FieldFunction& field, int two_m0, double t_start) {
  return field_aligned_basis(sys, field(t_start)).col(sys.index_of(two_m0));
}

}  // namespace detail

/// Starts in the field-aligned state m0 at t_start and returns |c_m'|^2 at
/// t_end in the basis selected by settings.basis_out.
inline PopulationResult final_populations(const SpinSystem& sys, const FieldModel& model, int two_m0,
                                          const PropagationSettings& settings) {
  settings.validate(model);
  const FieldFunction field = detail::as_function(model);
  PropagationDiagnostics diag;
  CVector c = detail::integrate(sys, field, detail::prepare(sys, field, two_m0, settings.t_start), settings.t_start,
                                settings.t_end, settings, diag, [](const auto&, const auto&) {});
  c /= c.norm();
  return {measure(sys, c, field(settings.t_end), settings.basis_out), diag};
}

/// Populations at n_samples uniformly spaced times over the window, from the
/// integrator's continuous extension.
inline TimeTrace time_trace(const SpinSystem& sys, const FieldModel& model, int two_m0,
                            const PropagationSettings& settings, int n_samples) {
  if (n_samples < 2) throw DomainError("time_trace: n_samples must be >= 2");
  settings.validate(model);
  const FieldFunction field = detail::as_function(model);

  TimeTrace trace;
  trace.basis = settings.basis_out;
  trace.times.resize(n_samples);
  const double span = settings.t_end - settings.t_start;
  for (int i = 0; i < n_samples; ++i) {
    trace.times[i] = (i == n_samples - 1) ? settings.t_end : settings.t_start + span * i / (n_samples - 1);
  }
  trace.populations = RMatrix::Zero(n_samples, sys.dimension());
  trace.field_snapshots.reserve(n_samples);
  for (double t : trace.times) trace.field_snapshots.push_back(field(t));

  auto record = [&](int i, CVector c) {
    c /= c.norm();
    trace.populations.row(i) = measure(sys, c, trace.field_snapshots[i], settings.basis_out).transpose();
  };

  const CVector c0 = detail::prepare(sys, field, two_m0, settings.t_start);
  record(0, c0);
  int next = 1;
  // Samples that coincide with t_start (zero-length window).
  while (next < n_samples && trace.times[next] <= settings.t_start) record(next++, c0);

  const CVector c_end = detail::integrate(
      sys, field, c0, settings.t_start, settings.t_end, settings, trace.diagnostics,
      [&](const Dopri5DenseStep<CVector>& dense, const CVector&) {
        const double t_hi = std::max(dense.t_begin, dense.t_end());
        while (next < n_samples - 1 && trace.times[next] <= t_hi) {
          record(next, dense(trace.times[next]));
          ++next;
        }
      });
  while (next < n_samples) record(next++, c_end);
  return trace;
}

}  // namespace majorana
