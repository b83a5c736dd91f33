#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "majorana/errors.hpp"
#include "majorana/spin_system.hpp"

namespace majorana {

using FieldVector = Eigen::Vector3d;  // (B_x, B_y, B_z) in tesla

enum class FieldMode { ExactExponential, Linearized };

/// Field seen by the atoms while the Ioffe and quadrupole coils discharge.
///
/// Both coils start decaying at t = 0 with 1/e times tau_i and tau_q. The
/// Ioffe and quadrupole contributions along z oppose each other, so a faster
/// Ioffe decay makes B_z pass through zero while B_y stays finite.
/// Linearized mode keeps B_y at its initial value and B_z on the tangent line
/// at t = 0.
struct FieldModel {
  double B_yI = 0.0;  // T
  double B_yQ = 0.0;  // T
  double B_zI = 0.0;  // T
  double B_zQ = 0.0;  // T
  double tau_i = 1.0;  // s
  double tau_q = 1.0;  // s
  FieldMode mode = FieldMode::Linearized;

  double A_y() const noexcept { return B_yI + B_yQ; }
  double A_z() const noexcept { return B_zI - B_zQ; }
  double C_z() const noexcept { return B_zI / tau_i - B_zQ / tau_q; }

  void validate() const {
    if (!(tau_i > 0) || !(tau_q > 0)) throw DomainError("FieldModel: tau_i and tau_q must be positive");
    if (B_yI < 0 || B_yQ < 0 || B_zI < 0 || B_zQ < 0) {
      throw DomainError("FieldModel: coil field components must be non-negative");
    }
    if (!(A_y() > 0)) throw DomainError("FieldModel: A_y = B_yI + B_yQ must be positive");
  }

  FieldModel with_tau_i(double t) const {
    FieldModel copy = *this;
    copy.tau_i = t;
    return copy;
  }

  FieldModel with_mode(FieldMode m) const {
    FieldModel copy = *this;
    copy.mode = m;
    return copy;
  }

  /// Linearized ramp with prescribed A_y, A_z and C_z. Realized with a pure
  /// Ioffe contribution along y and a quadrupole decay of tau_q.
  static FieldModel from_linear(double a_y, double a_z, double c_z, double b_zq, double tau_q) {
    FieldModel f;
    f.B_yI = a_y;
    f.B_yQ = 0.0;
    f.B_zQ = b_zq;
    f.B_zI = a_z + b_zq;
    f.tau_q = tau_q;
    f.tau_i = f.B_zI / (c_z + b_zq / tau_q);
    f.mode = FieldMode::Linearized;
    f.validate();
    return f;
  }
};

inline FieldVector field_at(const FieldModel& model, double t) {
  if (model.mode == FieldMode::Linearized) {
    return {0.0, model.A_y(), model.A_z() - model.C_z() * t};
  }
  const double ei = std::exp(-t / model.tau_i);
  const double eq = std::exp(-t / model.tau_q);
  return {0.0, model.B_yI * ei + model.B_yQ * eq, model.B_zI * ei - model.B_zQ * eq};
}

/// Time derivative of field_at.
inline FieldVector field_rate_at(const FieldModel& model, double t) {
  if (model.mode == FieldMode::Linearized) return {0.0, 0.0, -model.C_z()};
  const double ei = std::exp(-t / model.tau_i);
  const double eq = std::exp(-t / model.tau_q);
  return {0.0, -model.B_yI / model.tau_i * ei - model.B_yQ / model.tau_q * eq,
          -model.B_zI / model.tau_i * ei + model.B_zQ / model.tau_q * eq};
}

/// Whether B_z changes sign. The linearized ramp is the tangent of the
/// exponential one, so it inherits the requirement that the Ioffe coil
/// decays faster than the quadrupole coils.
inline bool has_reversal(const FieldModel& model) {
  if (!(model.A_z() > 0) || !(model.tau_i < model.tau_q)) return false;
  if (model.mode == FieldMode::Linearized) return model.C_z() > 0;
  return model.B_zQ > 0;
}

/// Time t* at which B_z(t*) = 0.
inline double reversal_time(const FieldModel& model) {
  if (!has_reversal(model)) {
    throw NoReversal("field does not reverse: need B_zI > B_zQ" +
                     std::string(model.mode == FieldMode::ExactExponential ? " > 0" : "") +
                     " and tau_i < tau_q (A_z=" + std::to_string(model.A_z()) +
                     " T, C_z=" + std::to_string(model.C_z()) + " T/s)");
  }
  if (model.mode == FieldMode::Linearized) return model.A_z() / model.C_z();
  return std::log(model.B_zI / model.B_zQ) / (1.0 / model.tau_i - 1.0 / model.tau_q);
}

/// Angular rate of the field direction in the y-z plane, divided by 2 pi.
inline double rotation_frequency(const FieldModel& model, double t) {
  const FieldVector b = field_at(model, t);
  const double b2 = b.squaredNorm();
  if (!(b2 > 0)) throw ZeroField("rotation_frequency: |B| = 0 at t = " + std::to_string(t));
  const FieldVector db = field_rate_at(model, t);
  const double dphi = (b.z() * db.y() - b.y() * db.z()) / b2;
  return std::abs(dphi) / (2.0 * constants::pi);
}

inline double larmor_frequency(const SpinSystem& sys, double field_magnitude) {
  if (!(field_magnitude > 0)) throw ZeroField("larmor_frequency: |B| = 0");
  return std::abs(sys.g_factor) * sys.mu_B * field_magnitude / (2.0 * constants::pi * sys.hbar);
}

inline double larmor_frequency(const SpinSystem& sys, const FieldModel& model, double t) {
  return larmor_frequency(sys, field_at(model, t).norm());
}

}  // namespace majorana
