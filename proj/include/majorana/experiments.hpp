#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "majorana/analytic.hpp"
#include "majorana/field_model.hpp"
#include "majorana/propagator.hpp"
#include "majorana/spin_system.hpp"

namespace majorana {

enum class Engines { AnalyticOnly, NumericOnly, Both };

inline bool runs_analytic(Engines e) { return e != Engines::NumericOnly; }
inline bool runs_numeric(Engines e) { return e != Engines::AnalyticOnly; }

/// A tau_i sweep at fixed quadrupole decay, as in a turn-off-time series.
struct SweepConfig {
  SpinSystem sys;
  FieldModel base_model;
  int two_m0 = 4;
  std::vector<double> tau_i_values;  // s
  std::optional<double> K;           // (T s)^-1, default_K(sys) when empty
  /// Tolerances and basis; the window is recomputed per point when auto_window.
  PropagationSettings settings;
  bool auto_window = true;
  double adiabaticity = kDefaultAdiabaticity;
  Engines engines = Engines::Both;
  bool parallel = false;

  double effective_K() const { return K ? *K : default_K(sys); }

  void validate() const {
    sys.validate();
    base_model.validate();
    sys.index_of(two_m0);
    if (tau_i_values.empty()) throw DomainError("SweepConfig: tau_i_values is empty");
    for (double t : tau_i_values) {
      if (!(t > 0)) throw DomainError("SweepConfig: tau_i values must be positive");
    }
    if (!(adiabaticity > 0)) throw DomainError("SweepConfig: adiabaticity ratio must be positive");
  }
};

struct SweepRecord {
  double tau_i = 0.0;
  bool reversal = false;
  RVector analytic;  // empty when not computed
  RVector numeric;   // empty when not computed or failed
  double f_rot_at_reversal = std::numeric_limits<double>::quiet_NaN();
  double flip_p = 0.0;
  double theta = 0.0;
  double window = std::numeric_limits<double>::quiet_NaN();
  double worst_norm_drift = 0.0;
  std::string error;  // per-point failure, empty on success
  bool integrator_failed = false;
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepRecord> records;

  bool all_degenerate() const {
    return std::all_of(records.begin(), records.end(), [](const SweepRecord& r) { return !r.reversal; });
  }
};

inline RVector unit_distribution(const SpinSystem& sys, int two_m0) {
  RVector v = RVector::Zero(sys.dimension());
  v(sys.index_of(two_m0)) = 1.0;
  return v;
}

inline SweepRecord sweep_point(const SweepConfig& config, double tau_i) {
  SweepRecord rec;
  rec.tau_i = tau_i;
  const SpinSystem& sys = config.sys;
  const FieldModel model = config.base_model.with_tau_i(tau_i);
  try {
    model.validate();
    rec.reversal = has_reversal(model);
    if (!rec.reversal) {
      rec.error = "no reversal";
      if (runs_analytic(config.engines)) rec.analytic = unit_distribution(sys, config.two_m0);
      if (runs_numeric(config.engines)) rec.numeric = unit_distribution(sys, config.two_m0);
      return rec;
    }
    const FieldModel linear = model.with_mode(FieldMode::Linearized);
    rec.f_rot_at_reversal = rotation_frequency(linear, reversal_time(linear));
    rec.flip_p = flip_probability(linear, config.effective_K());
    rec.theta = theta_from_p(rec.flip_p).theta;
    rec.window = transition_window(sys, linear);
    if (runs_analytic(config.engines)) {
      rec.analytic = analytic_distribution(sys, linear, config.two_m0, config.effective_K());
    }
    if (runs_numeric(config.engines)) {
      PropagationSettings settings = config.settings;
      if (config.auto_window) {
        const PropagationSettings window = default_settings(sys, model, config.adiabaticity);
        settings.t_start = window.t_start;
        settings.t_end = window.t_end;
      }
      const PopulationResult res = final_populations(sys, model, config.two_m0, settings);
      rec.numeric = res.populations;
      rec.worst_norm_drift = res.diagnostics.worst_norm_drift;
    }
  } catch (const StepSizeUnderflow& e) {
    rec.error = e.what();
    rec.integrator_failed = true;
  } catch (const Error& e) {
    rec.error = e.what();
  }
  return rec;
}

/// One record per tau_i, in input order. A failing point is recorded and the
/// sweep continues.
inline SweepResult sweep_tau_i(const SweepConfig& config) {
  config.validate();
  SweepResult result;
  result.config = config;
  result.records.resize(config.tau_i_values.size());
  if (config.parallel) {
    std::vector<std::future<SweepRecord>> jobs;
    jobs.reserve(config.tau_i_values.size());
    for (double tau : config.tau_i_values) {
      jobs.push_back(std::async(std::launch::async, [&config, tau] { return sweep_point(config, tau); }));
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) result.records[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < config.tau_i_values.size(); ++i) {
      result.records[i] = sweep_point(config, config.tau_i_values[i]);
    }
  }
  return result;
}

inline constexpr double kEngineDiscrepancyThreshold = 1e-2;

struct PointDiscrepancy {
  double tau_i = 0.0;
  double max_abs_diff = std::numeric_limits<double>::quiet_NaN();
  bool flagged = false;
  std::string error;
};

struct EngineReport {
  SweepResult sweep;
  std::vector<PointDiscrepancy> points;

  double max_abs_diff() const {
    double worst = 0.0;
    for (const auto& p : points) {
      if (std::isnan(p.max_abs_diff)) continue;
      worst = std::max(worst, p.max_abs_diff);
    }
    return worst;
  }
  bool any_flagged() const {
    return std::any_of(points.begin(), points.end(), [](const PointDiscrepancy& p) { return p.flagged; });
  }
};

inline EngineReport compare_engines(const SweepConfig& config) {
  if (config.engines != Engines::Both) throw DomainError("compare_engines: engines must be Both");
  EngineReport report;
  report.sweep = sweep_tau_i(config);
  for (const SweepRecord& r : report.sweep.records) {
    PointDiscrepancy d;
    d.tau_i = r.tau_i;
    d.error = r.error;
    if (r.analytic.size() > 0 && r.numeric.size() == r.analytic.size()) {
      d.max_abs_diff = (r.analytic - r.numeric).cwiseAbs().maxCoeff();
      d.flagged = d.max_abs_diff > kEngineDiscrepancyThreshold;
    } else {
      d.flagged = true;
    }
    report.points.push_back(d);
  }
  return report;
}

/// |d^J_{m',m}(theta)|^2 from the rotation operator exp(-i theta F_y),
/// built by diagonalizing F_y. Shares nothing with multilevel_matrix.
inline TransitionMatrix wigner_d_oracle(int two_J, double theta) {
  const SpinSystem sys(two_J);
  const CMatrix fy = angular_momentum_ops(sys).y;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(fy);
  const CVector phases = (solver.eigenvalues().cast<cplx>() * cplx(0.0, -theta)).array().exp();
  const CMatrix rotation = solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
  TransitionMatrix out;
  out.two_J = two_J;
  // rotation(m', m) = d_{m' m}; entries(m, m') holds P(m -> m').
  out.entries = rotation.cwiseAbs2().transpose();
  return out;
}

/// Linearized ramp whose rotation frequency at reversal is f_rot, keeping the
/// transverse field, offset and quadrupole decay of `base`.
inline FieldModel ramp_for_rotation_frequency(const FieldModel& base, double f_rot) {
  const double c_z = 2.0 * constants::pi * base.A_y() * f_rot;
  return FieldModel::from_linear(base.A_y(), base.A_z(), c_z, base.B_zQ, base.tau_q);
}

/// Duration of the transition in a trace: from the first sample whose
/// population in `column` has moved 10% of the net change away from the
/// initial value, to the last sample still 10% of the net change away from
/// the final value. Zero if the population does not change.
inline double activity_window(const TimeTrace& trace, int column) {
  const auto p = trace.populations.col(column);
  const Eigen::Index n = p.size();
  const double p0 = p(0);
  const double pf = p(n - 1);
  const double delta = std::abs(pf - p0);
  if (delta < 1e-12) return 0.0;
  Eigen::Index lo = 0;
  while (lo < n && std::abs(p(lo) - p0) < 0.1 * delta) ++lo;
  Eigen::Index hi = n - 1;
  while (hi > 0 && std::abs(p(hi) - pf) < 0.1 * delta) --hi;
  if (hi <= lo) return 0.0;
  return trace.times[hi] - trace.times[lo];
}

}  // namespace majorana
