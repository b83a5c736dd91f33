#pragma once

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "majorana/errors.hpp"

namespace majorana {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

namespace constants {
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double bohr_magneton = 9.2740100783e-24;  // J/T
inline constexpr double hbar = 1.054571817e-34;            // J s
/// Landé factor of the 87Rb F=2 hyperfine manifold.
inline constexpr double g_rb87_f2 = 0.5;
}  // namespace constants

/// Magnetic quantum numbers are carried as twice their value so that
/// half-integer spins stay exact. Basis index 0 is m = +J.
struct SpinSystem {
  int two_J = 4;
  double g_factor = constants::g_rb87_f2;
  double mu_B = constants::bohr_magneton;
  double hbar = constants::hbar;

  SpinSystem() = default;
  SpinSystem(int two_j, double g = constants::g_rb87_f2, double bohr = constants::bohr_magneton,
             double reduced_planck = constants::hbar)
      : two_J(two_j), g_factor(g), mu_B(bohr), hbar(reduced_planck) {
    validate();
  }

  void validate() const {
    if (two_J < 1) throw DomainError("SpinSystem: two_J must be >= 1, got " + std::to_string(two_J));
    if (!(mu_B > 0) || !(hbar > 0)) throw DomainError("SpinSystem: mu_B and hbar must be positive");
    if (!std::isfinite(g_factor)) throw DomainError("SpinSystem: g_factor must be finite");
  }

  int dimension() const noexcept { return two_J + 1; }
  double j() const noexcept { return 0.5 * two_J; }

  /// g mu_B / hbar in rad s^-1 T^-1.
  double gyromagnetic_ratio() const noexcept { return g_factor * mu_B / hbar; }

  bool valid_two_m(int two_m) const noexcept {
    return two_m >= -two_J && two_m <= two_J && ((two_J - two_m) % 2 == 0);
  }

  int index_of(int two_m) const {
    if (!valid_two_m(two_m)) {
      throw DomainError("m = " + std::to_string(two_m) + "/2 is not a state of spin " +
                        std::to_string(two_J) + "/2");
    }
    return (two_J - two_m) / 2;
  }

  int two_m_at(int index) const noexcept { return two_J - 2 * index; }
  double m_at(int index) const noexcept { return 0.5 * two_m_at(index); }
};

/// Spin operators in units of hbar, expressed in the descending-m basis.
struct AngularMomentumOps {
  CMatrix x;
  CMatrix y;
  CMatrix z;
};

/// Ladder-operator construction: <m+1|F+|m> = sqrt(J(J+1) - m(m+1)).
inline AngularMomentumOps angular_momentum_ops(const SpinSystem& sys) {
  const int n = sys.dimension();
  const double j = sys.j();
  CMatrix raise = CMatrix::Zero(n, n);
  CMatrix fz = CMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double m = sys.m_at(k);
    fz(k, k) = m;
    if (k > 0) raise(k - 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  const CMatrix lower = raise.adjoint();
  AngularMomentumOps ops;
  ops.x = 0.5 * (raise + lower);
  ops.y = cplx(0.0, -0.5) * (raise - lower);
  ops.z = fz;
  return ops;
}

}  // namespace majorana
