#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "majorana/analytic.hpp"
#include "majorana/experiments.hpp"
#include "majorana/propagator.hpp"

namespace majorana {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured quantity
  double threshold = 0.0;  // pass bound on value
  std::string detail;
};

struct ValidationInputs {
  SpinSystem sys{4};  // g, mu_B and hbar are taken from here
  FieldModel field;   // supplies A_y, A_z, B_zQ, tau_q
  double K = 0.0;     // constant under test in the flip formula
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  double adiabaticity = 1e4;
};

namespace detail {

inline SpinSystem with_spin(const SpinSystem& base, int two_j) {
  return SpinSystem(two_j, base.g_factor, base.mu_B, base.hbar);
}

inline double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace detail

/// Quick versions of the library's invariants, used by `majorana validate`.
inline std::vector<CheckResult> run_invariant_suite(const ValidationInputs& in) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> angle(0.0, constants::pi);

  {
    double worst = 0.0;
    for (int two_j = 1; two_j <= 8; ++two_j) {
      const auto f = angular_momentum_ops(SpinSystem(two_j));
      const cplx i(0.0, 1.0);
      const double scale = detail::max_abs(f.z) + detail::max_abs(f.x);
      worst = std::max({worst, detail::max_abs(f.x * f.y - f.y * f.x - i * f.z) / scale,
                        detail::max_abs(f.y * f.z - f.z * f.y - i * f.x) / scale,
                        detail::max_abs(f.z * f.x - f.x * f.z - i * f.y) / scale});
    }
    out.push_back({"angular momentum commutators (2J=1..8)", worst <= 1e-12, worst, 1e-12, "relative"});
  }

  double oracle_err = 0.0;
  double stochastic_err = 0.0;
  for (int two_j : {1, 2, 3, 4, 6, 8}) {
    const SpinSystem sys(two_j);
    for (int k = 0; k < 25; ++k) {
      const double theta = angle(rng);
      const TransitionMatrix p = multilevel_matrix(sys, theta_from_p(std::pow(std::sin(theta / 2), 2)));
      const TransitionMatrix d = wigner_d_oracle(two_j, theta);
      oracle_err = std::max(oracle_err, (p.entries - d.entries).cwiseAbs().maxCoeff());
      const RMatrix& e = p.entries;
      const int n = sys.dimension();
      const RVector ones = RVector::Ones(n);
      stochastic_err = std::max({stochastic_err, (e.rowwise().sum() - ones).cwiseAbs().maxCoeff(),
                                 (e.colwise().sum().transpose() - ones).cwiseAbs().maxCoeff(),
                                 (e - e.transpose()).cwiseAbs().maxCoeff(),
                                 (e - e.reverse()).cwiseAbs().maxCoeff()});
    }
  }
  out.push_back({"multilevel matrix vs Wigner-d oracle (max |diff|)", oracle_err <= 1e-12, oracle_err, 1e-12, ""});
  out.push_back({"doubly stochastic and symmetric", stochastic_err <= 1e-12, stochastic_err, 1e-12, ""});

  const SpinSystem half = detail::with_spin(in.sys, 1);
  const SpinSystem five = detail::with_spin(in.sys, 4);
  const double a_y = in.field.A_y();
  const double k_true = default_K(half);
  double lz_worst = 0.0;
  double ml_worst = 0.0;
  double drift = 0.0;
  std::string lz_detail;
  for (double target : {0.1, 0.5, 0.9}) {
    const double c_z = k_true * a_y * a_y / -std::log(target);
    const FieldModel ramp = FieldModel::from_linear(a_y, in.field.A_z(), c_z, in.field.B_zQ, in.field.tau_q);
    PropagationSettings s = default_settings(half, ramp, in.adiabaticity);
    s.rel_tol = in.rel_tol;
    s.abs_tol = in.abs_tol;
    const PopulationResult two_level = final_populations(half, ramp, 1, s);
    const double p_num = two_level.populations(1);
    const double p_formula = flip_probability(ramp, in.K);
    const double rel = std::abs(p_num - p_formula) / p_formula;
    lz_worst = std::max(lz_worst, rel);
    lz_detail += "p_num=" + std::to_string(p_num) + " p_formula=" + std::to_string(p_formula) + "; ";
    drift = std::max(drift, two_level.diagnostics.worst_norm_drift);
    if (target == 0.5) {
      const PopulationResult multi = final_populations(five, ramp, 4, s);
      const RVector predicted = multilevel_matrix(five, theta_from_p(p_num)).row(4);
      ml_worst = (predicted - multi.populations).cwiseAbs().maxCoeff();
      drift = std::max(drift, multi.diagnostics.worst_norm_drift);
    }
  }
  out.push_back({"flip formula vs numeric spin-1/2 (relative)", lz_worst <= 1e-2, lz_worst, 1e-2, lz_detail});
  out.push_back({"spin-2 numeric vs multilevel matrix", ml_worst <= 1e-3, ml_worst, 1e-3, "p_num ~ 0.5"});
  out.push_back({"worst norm drift", drift <= 1e-9, drift, 1e-9, "before renormalization"});

  {
    // Radicand (A_y/gamma)^{2/3} C^{-4/3} - A_y^2 C^{-2} changes sign at
    // C = gamma A_y^2: zero window below, positive above, peak at 1.5^{3/2} C
    // and decreasing beyond it.
    const double gamma = std::abs(five.gyromagnetic_ratio());
    const double boundary = gamma * a_y * a_y;
    auto window_at = [&](double c_z) {
      return transition_window(five, FieldModel::from_linear(a_y, in.field.A_z(), c_z, in.field.B_zQ, in.field.tau_q));
    };
    const bool below_zero = window_at(boundary * 0.999) == 0.0 && window_at(boundary * 0.5) == 0.0;
    const bool above_positive = window_at(boundary * 1.001) > 0.0;
    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (double c = boundary * 1.9; c < boundary * 1e6; c *= 1.3) {
      const double w = window_at(c);
      if (!(w < prev)) monotone = false;
      prev = w;
    }
    const bool ok = below_zero && above_positive && monotone;
    out.push_back({"transition window sign change at C_z = g mu_B A_y^2 / hbar", ok, boundary, 0.0,
                   ok ? "zero below, positive above, decreasing past the peak" : "window boundary mismatch"});
  }

  {
    double asym = 0.0;
    for (double p : {0.1, 0.37, 0.5, 0.8}) {
      const RVector row = multilevel_matrix(five, theta_from_p(p)).row(0);
      asym = std::max(asym, (row - row.reverse()).cwiseAbs().maxCoeff());
    }
    out.push_back({"m0 = 0 distribution symmetric", asym <= 1e-12, asym, 1e-12, ""});
  }
  return out;
}

}  // namespace majorana
