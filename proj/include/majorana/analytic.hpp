#pragma once

#include <array>
#include <cmath>
#include <string>

#include "majorana/errors.hpp"
#include "majorana/field_model.hpp"
#include "majorana/spin_state.hpp"
#include "majorana/spin_system.hpp"

namespace majorana {

/// Largest 2J for which multilevel_matrix is supported.
inline constexpr int kMaxTwoJ = 40;

namespace detail {

/// log(n!) for 0 <= n <= 2 * kMaxTwoJ.
inline double log_factorial(int n) {
  static const auto table = [] {
    std::array<double, 2 * kMaxTwoJ + 1> t{};
    t[0] = 0.0;
    for (int k = 1; k < static_cast<int>(t.size()); ++k) t[k] = t[k - 1] + std::log(static_cast<double>(k));
    return t;
  }();
  return table.at(static_cast<std::size_t>(n));
}

/// base^exponent with 0^0 = 1; returns log-space magnitude, or -inf for 0.
inline double log_power(double log_base, int exponent) {
  if (exponent == 0) return 0.0;
  return exponent * log_base;
}

}  // namespace detail

/// Rotation angle of the two-level problem: sin^2(theta/2) = p_half.
struct ThetaParam {
  double theta = 0.0;  // rad, in [0, pi]
  double p_half = 0.0;
};

/// Landau-Zener value of the constant in the asymptotic flip formula,
/// K = pi g mu_B / (2 hbar), in (T s)^-1.
inline double default_K(const SpinSystem& sys) {
  return constants::pi * std::abs(sys.g_factor) * sys.mu_B / (2.0 * sys.hbar);
}

/// Majorana's two-level result exp(-f_Lar / f_Rot).
inline double majorana_two_level(double f_lar, double f_rot) {
  if (!(f_rot > 0)) throw DomainError("majorana_two_level: f_rot must be positive");
  if (!(f_lar >= 0)) throw DomainError("majorana_two_level: f_lar must be non-negative");
  return std::exp(-f_lar / f_rot);
}

/// Asymptotic 1/2 -> -1/2 flip probability for the linearized discharge ramp,
/// exp(-K A_y^2 / (B_zI/tau_i - B_zQ/tau_q)).
inline double flip_probability(const FieldModel& model, double K) {
  const double c_z = model.C_z();
  if (!(c_z > 0)) {
    throw NoReversal("flip_probability: C_z = B_zI/tau_i - B_zQ/tau_q = " + std::to_string(c_z) + " T/s <= 0");
  }
  if (!(K >= 0)) throw DomainError("flip_probability: K must be non-negative");
  const double a_y = model.A_y();
  return std::exp(-K * a_y * a_y / c_z);
}

inline double flip_probability(const SpinSystem& sys, const FieldModel& model) {
  return flip_probability(model, default_K(sys));
}

inline ThetaParam theta_from_p(double p_half) {
  if (!(p_half >= 0.0 && p_half <= 1.0)) {
    throw DomainError("theta_from_p: probability " + std::to_string(p_half) + " outside [0, 1]");
  }
  return {2.0 * std::asin(std::sqrt(p_half)), p_half};
}

/// Multilevel Majorana transition probabilities
///
///   P(m, m') = (J+m)!(J+m')!(J-m)!(J-m')! cos^{4J}(theta/2)
///              [ sum_nu (-1)^nu tan^{2nu-m+m'}(theta/2)
///                / (nu! (nu-m+m')! (J+m-nu)! (J-m'-nu)!) ]^2
///
/// Terms with a negative factorial argument vanish. The cos^{2J} factor is
/// folded into each term as cos^{2J-2nu+m-m'} sin^{2nu-m+m'}, so theta = pi
/// needs no special casing. Everything is evaluated in log space with the
/// sign carried separately.
inline TransitionMatrix multilevel_matrix(const SpinSystem& sys, const ThetaParam& theta) {
  const int two_j = sys.two_J;
  if (two_j < 1 || two_j > kMaxTwoJ) {
    throw DomainError("multilevel_matrix: 2J must be in [1, " + std::to_string(kMaxTwoJ) + "]");
  }
  if (!(theta.theta >= 0.0 && theta.theta <= constants::pi)) {
    throw DomainError("multilevel_matrix: theta outside [0, pi]");
  }
  using detail::log_factorial;
  using detail::log_power;

  const double half = 0.5 * theta.theta;
  const double log_c = std::log(std::cos(half));
  const double log_s = std::log(std::sin(half));
  const bool c_zero = std::cos(half) <= 0.0;
  const bool s_zero = std::sin(half) <= 0.0;

  const int n = sys.dimension();
  TransitionMatrix out;
  out.two_J = two_j;
  out.entries = RMatrix::Zero(n, n);

  for (int row = 0; row < n; ++row) {
    const int two_m = sys.two_m_at(row);
    const int j_plus_m = (two_j + two_m) / 2;
    const int j_minus_m = (two_j - two_m) / 2;
    for (int col = 0; col < n; ++col) {
      const int two_mp = sys.two_m_at(col);
      const int j_plus_mp = (two_j + two_mp) / 2;
      const int j_minus_mp = (two_j - two_mp) / 2;
      const int shift = (two_mp - two_m) / 2;  // m' - m

      const double log_prefactor = 0.5 * (log_factorial(j_plus_m) + log_factorial(j_plus_mp) +
                                          log_factorial(j_minus_m) + log_factorial(j_minus_mp));
      double amplitude = 0.0;
      for (int nu = 0; nu <= two_j; ++nu) {
        const int f2 = nu + shift;
        const int f3 = j_plus_m - nu;
        const int f4 = j_minus_mp - nu;
        if (f2 < 0 || f3 < 0 || f4 < 0) continue;
        const int cos_power = two_j - 2 * nu - shift;
        const int sin_power = 2 * nu + shift;
        if ((c_zero && cos_power > 0) || (s_zero && sin_power > 0)) continue;
        const double log_term = log_prefactor - log_factorial(nu) - log_factorial(f2) - log_factorial(f3) -
                                log_factorial(f4) + log_power(log_c, cos_power) + log_power(log_s, sin_power);
        const double term = std::exp(log_term);
        amplitude += (nu % 2 == 0) ? term : -term;
      }
      out.entries(row, col) = amplitude * amplitude;
    }
  }
  return out;
}

/// Duration over which the field direction turns faster than the spin
/// precesses (f_Rot >= f_Lar) on the linearized ramp:
///   dt = 2 sqrt((A_y hbar/(g mu_B))^{2/3} C_z^{-4/3} - A_y^2 C_z^{-2}).
/// Zero when the rotation never overtakes the precession.
inline double transition_window(const SpinSystem& sys, const FieldModel& model) {
  const double c_z = model.C_z();
  if (!(c_z > 0)) throw NoReversal("transition_window: C_z <= 0");
  const double b_y = model.A_y();
  const double gamma = std::abs(sys.g_factor) * sys.mu_B / sys.hbar;
  const double radicand = std::cbrt(std::pow(b_y / gamma, 2.0)) * std::pow(c_z, -4.0 / 3.0) -
                          (b_y * b_y) / (c_z * c_z);
  if (!(radicand > 0)) return 0.0;
  return 2.0 * std::sqrt(radicand);
}

/// Population over final m' after one reversal starting from m0, combining
/// the asymptotic flip probability with the multilevel matrix. Without a
/// reversal the population stays in m0.
inline RVector analytic_distribution(const SpinSystem& sys, const FieldModel& model, int two_m0, double K) {
  const int row = sys.index_of(two_m0);
  if (!has_reversal(model)) {
    RVector unit = RVector::Zero(sys.dimension());
    unit(row) = 1.0;
    return unit;
  }
  const double p = flip_probability(model, K);
  return multilevel_matrix(sys, theta_from_p(p)).entries.row(row).transpose();
}

}  // namespace majorana
