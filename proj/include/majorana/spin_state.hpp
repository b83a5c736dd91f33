#pragma once

#include <cmath>
#include <string>

#include "majorana/errors.hpp"
#include "majorana/spin_system.hpp"

namespace majorana {

inline constexpr double kNormTolerance = 1e-9;

/// Amplitudes c_m over m = +J..-J at a given time.
struct SpinState {
  CVector amplitudes;
  double time = 0.0;

  SpinState() = default;
  SpinState(CVector amps, double t) : amplitudes(std::move(amps)), time(t) {
    const double drift = norm_drift();
    if (!(drift <= kNormTolerance)) {
      throw DomainError("SpinState: amplitudes not normalized (|norm^2 - 1| = " + std::to_string(drift) + ")");
    }
  }

  static SpinState basis(const SpinSystem& sys, int two_m, double t = 0.0) {
    CVector c = CVector::Zero(sys.dimension());
    c(sys.index_of(two_m)) = 1.0;
    return SpinState(std::move(c), t);
  }

  double norm_drift() const { return std::abs(amplitudes.squaredNorm() - 1.0); }

  RVector populations() const { return amplitudes.cwiseAbs2(); }
};

/// P(m -> m'), rows indexed by the initial m and columns by the final m',
/// both in descending order.
struct TransitionMatrix {
  int two_J = 1;
  RMatrix entries;

  double operator()(int two_m, int two_m_final) const {
    return entries((two_J - two_m) / 2, (two_J - two_m_final) / 2);
  }

  RVector row(int two_m) const { return entries.row((two_J - two_m) / 2).transpose(); }
};

}  // namespace majorana
