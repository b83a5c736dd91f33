// Acceptance gate: one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion
//   acceptance --only N   run criterion N (exit status reflects that one)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "majorana/analytic.hpp"
#include "majorana/experiments.hpp"
#include "majorana/propagator.hpp"

using namespace majorana;

namespace {

struct Outcome {
  bool passed = false;
  std::string summary;
};

// Worst norm drift over every numeric run in this process.
double g_worst_drift = 0.0;
int g_numeric_runs = 0;

void note_drift(double d) {
  g_worst_drift = std::max(g_worst_drift, d);
  ++g_numeric_runs;
}

constexpr double kRatio = 1e4;  // f_Lar / f_Rot at the window ends

FieldModel base_field() {
  FieldModel f;
  f.B_yI = 0.3e-4;
  f.B_yQ = 0.2e-4;
  f.B_zI = 50e-4;
  f.B_zQ = 45e-4;
  f.tau_q = 117.7e-6;
  f.tau_i = 117.7e-6;
  return f;
}

FieldModel ramp_with_flip(const SpinSystem& half, double p) {
  const FieldModel base = base_field();
  const double c_z = default_K(half) * base.A_y() * base.A_y() / -std::log(p);
  return FieldModel::from_linear(base.A_y(), base.A_z(), c_z, base.B_zQ, base.tau_q);
}

PopulationResult run(const SpinSystem& sys, const FieldModel& model, int two_m0) {
  const PropagationSettings s = default_settings(sys, model, kRatio);
  PopulationResult r = final_populations(sys, model, two_m0, s);
  note_drift(r.diagnostics.worst_norm_drift);
  return r;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

const std::vector<int> kSpinGrid{1, 2, 3, 4, 6, 8};

Outcome criterion_1() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> angle(0.0, constants::pi);
  double worst = 0.0;
  for (int two_j : kSpinGrid) {
    for (int k = 0; k < 100; ++k) {
      const double theta = angle(rng);
      const RMatrix p = multilevel_matrix(SpinSystem(two_j), {theta, std::pow(std::sin(theta / 2), 2)}).entries;
      worst = std::max(worst, (p - wigner_d_oracle(two_j, theta).entries).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-12, "max |P - oracle| = " + fmt(worst) + " (bound 1e-12)"};
}

Outcome criterion_2() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> angle(0.0, constants::pi);
  double worst = 0.0;
  for (int two_j : kSpinGrid) {
    const RVector ones = RVector::Ones(two_j + 1);
    for (int k = 0; k < 100; ++k) {
      const double theta = angle(rng);
      const RMatrix e = multilevel_matrix(SpinSystem(two_j), {theta, 0.0}).entries;
      worst = std::max({worst, (e.rowwise().sum() - ones).cwiseAbs().maxCoeff(),
                        (e.colwise().sum().transpose() - ones).cwiseAbs().maxCoeff(),
                        (e - e.transpose()).cwiseAbs().maxCoeff(), (e - e.reverse()).cwiseAbs().maxCoeff()});
    }
  }
  return {worst <= 1e-12, "max deviation = " + fmt(worst) + " (bound 1e-12)"};
}

Outcome criterion_3() {
  const SpinSystem half(1);
  const double K = default_K(half);
  double worst = 0.0;
  double worst_ratio = std::numeric_limits<double>::infinity();
  for (double p : {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95}) {
    const FieldModel ramp = ramp_with_flip(half, p);
    const PropagationSettings s = default_settings(half, ramp, kRatio);
    for (double t : {s.t_start, s.t_end}) {
      worst_ratio = std::min(worst_ratio, larmor_frequency(half, ramp, t) / rotation_frequency(ramp, t));
    }
    const double p_num = run(half, ramp, 1).populations(1);
    const double p_lz = flip_probability(ramp, K);
    worst = std::max(worst, std::abs(p_num - p_lz) / p_lz);
  }
  const bool ok = worst <= 1e-2 && worst_ratio >= 100.0;
  return {ok, "max relative error = " + fmt(worst) + " (bound 1e-2), min f_Lar/f_Rot at window ends = " +
                  fmt(worst_ratio) + " (need >= 100)"};
}

Outcome criterion_4() {
  const SpinSystem half(1), five(4);
  double worst = 0.0;
  for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const FieldModel ramp = ramp_with_flip(half, p);
    const double p_num = run(half, ramp, 1).populations(1);
    const RVector numeric = run(five, ramp, 4).populations;
    const RVector predicted = multilevel_matrix(five, theta_from_p(p_num)).row(4);
    worst = std::max(worst, (numeric - predicted).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-3, "max |numeric - P(theta(p_num))| = " + fmt(worst) + " (bound 1e-3)"};
}

SweepConfig fig_sweep(int two_m0, std::vector<double> taus) {
  SweepConfig c;
  c.sys = SpinSystem(4);
  c.base_model = base_field();
  c.two_m0 = two_m0;
  c.tau_i_values = std::move(taus);
  c.adiabaticity = kRatio;
  c.engines = Engines::Both;
  return c;
}

void note_sweep(const SweepResult& r) {
  for (const SweepRecord& rec : r.records) {
    if (rec.reversal) note_drift(rec.worst_norm_drift);
  }
}

Outcome criterion_5() {
  const FieldModel base = base_field();
  // Shrink tau_i until the closed-form flip exceeds 0.999.
  double tau_fast = 4.4e-6;
  while (flip_probability(SpinSystem(4), base.with_tau_i(tau_fast)) <= 0.999) tau_fast *= 0.8;
  const SweepResult r = sweep_tau_i(fig_sweep(4, {base.tau_q, tau_fast}));
  note_sweep(r);
  const SweepRecord& slow = r.records[0];
  const SweepRecord& fast = r.records[1];
  if (slow.analytic.size() != 5 || slow.numeric.size() != 5 || fast.analytic.size() != 5 ||
      fast.numeric.size() != 5) {
    return {false, "missing distribution: " + slow.error + fast.error};
  }
  const double keep = std::min(slow.analytic(0), slow.numeric(0));
  const double flipped = std::min(fast.analytic(4), fast.numeric(4));
  return {keep >= 0.999 && flipped >= 0.99, "tau_i = tau_q keeps " + fmt(keep) + " in m=+2 (need >= 0.999); tau_i = " +
                                                fmt(tau_fast * 1e9) + " ns puts " + fmt(flipped) +
                                                " in m=-2 (need >= 0.99)"};
}

Outcome criterion_6() {
  const SweepResult r = sweep_tau_i(fig_sweep(0, {157.6e-6, 31.3e-6, 19.5e-6, 16.6e-6, 8.8e-6, 7.9e-6, 4.3e-6}));
  note_sweep(r);
  double a_asym = 0.0, n_asym = 0.0;
  for (const SweepRecord& rec : r.records) {
    if (rec.analytic.size() != 5 || rec.numeric.size() != 5) return {false, "missing distribution: " + rec.error};
    a_asym = std::max(a_asym, (rec.analytic - rec.analytic.reverse()).cwiseAbs().maxCoeff());
    n_asym = std::max(n_asym, (rec.numeric - rec.numeric.reverse()).cwiseAbs().maxCoeff());
  }
  return {a_asym < 1e-12 && n_asym < 1e-6,
          "analytic asymmetry = " + fmt(a_asym) + " (< 1e-12), numeric asymmetry = " + fmt(n_asym) + " (< 1e-6)"};
}

Outcome criterion_7() {
  const SweepResult r = sweep_tau_i(fig_sweep(4, {117.7e-6, 30.3e-6, 16.1e-6, 11.4e-6, 7.7e-6, 5.8e-6, 4.4e-6}));
  note_sweep(r);
  double worst_violation = 0.0;
  for (bool numeric : {false, true}) {
    for (std::size_t i = 1; i < r.records.size(); ++i) {
      const RVector& prev = numeric ? r.records[i - 1].numeric : r.records[i - 1].analytic;
      const RVector& cur = numeric ? r.records[i].numeric : r.records[i].analytic;
      if (prev.size() != 5 || cur.size() != 5) return {false, "missing distribution: " + r.records[i].error};
      worst_violation = std::max({worst_violation, prev(4) - cur(4), cur(0) - prev(0)});
    }
  }
  std::string trend;
  for (const SweepRecord& rec : r.records) trend += fmt(rec.numeric(4)) + " ";
  return {worst_violation <= 1e-4,
          "worst monotonicity violation = " + fmt(worst_violation) + " (tol 1e-4); numeric m=-2: " + trend};
}

Outcome criterion_8() {
  const SpinSystem five(4);
  const FieldModel base = base_field();
  std::vector<double> flips;
  std::string detail;
  bool windows_ok = true;
  for (double f_rot : {0.6e6, 1.2e6, 2.8e6}) {
    const FieldModel ramp = ramp_for_rotation_frequency(base, f_rot);
    PropagationSettings s = default_settings(five, ramp, kRatio);
    s.basis_out = MeasurementBasis::FieldAligned;
    const TimeTrace trace = time_trace(five, ramp, 4, s, 20001);
    note_drift(trace.diagnostics.worst_norm_drift);
    flips.push_back(1.0 - trace.populations(trace.populations.rows() - 1, 0));
    const double activity = activity_window(trace, 0);
    const double dt = transition_window(five, ramp);
    const bool factor3 = dt > 0 && activity <= 3 * dt && activity >= dt / 3;
    const bool order = activity >= 0.1e-6 && activity <= 10e-6;
    windows_ok &= factor3 && order;
    detail += "f_Rot=" + fmt(f_rot / 1e6) + " MHz: flip=" + fmt(flips.back()) + ", activity=" + fmt(activity * 1e6) +
              " us, dt=" + fmt(dt * 1e6) + " us; ";
  }
  const bool increasing = flips[0] < flips[1] && flips[1] < flips[2];
  return {increasing && windows_ok, detail + "f_Lar=" + fmt(larmor_frequency(five, base.A_y()) / 1e6) + " MHz"};
}

Outcome criterion_9() {
  if (g_numeric_runs == 0) {
    // Run alone: exercise every numeric criterion first.
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
  }
  return {g_worst_drift <= 1e-9,
          "worst norm drift = " + fmt(g_worst_drift) + " over " + std::to_string(g_numeric_runs) + " runs (bound 1e-9)"};
}

// Checked as stated: zero for every C_z at or beyond g mu_B A_y^2 / hbar, and
// monotone decreasing in C_z wherever positive.
Outcome criterion_10() {
  const SpinSystem sys(4);
  const FieldModel base = base_field();
  const double a_y = base.A_y();
  const double gamma = sys.g_factor * sys.mu_B / sys.hbar;
  const double boundary = gamma * a_y * a_y;
  auto window = [&](double c) {
    return transition_window(sys, FieldModel::from_linear(a_y, base.A_z(), c, base.B_zQ, base.tau_q));
  };
  // Independent algebra: the radicand factors as
  //   (A_y/gamma)^{2/3} C^{-4/3} [1 - (gamma A_y^2 / C)^{2/3}],
  // so its sign is that of C - gamma A_y^2.
  auto radicand_sign = [&](double c) { return c > boundary ? 1 : (c < boundary ? -1 : 0); };

  bool sign_agrees = true;
  bool zero_beyond = true;
  bool decreasing = true;
  double first_positive_beyond = 0.0;
  double first_increase = 0.0;
  double prev_c = 0.0, prev_w = -1.0;
  for (double rho = 1e-3; rho <= 1e6; rho *= 1.01) {
    const double c = rho * boundary;
    const double w = window(c);
    if ((w > 0) != (radicand_sign(c) > 0)) sign_agrees = false;
    if (c >= boundary && w != 0.0 && zero_beyond) {
      zero_beyond = false;
      first_positive_beyond = rho;
    }
    if (w > 0 && prev_w > 0 && w >= prev_w && decreasing) {
      decreasing = false;
      first_increase = prev_c / boundary;
    }
    prev_c = c;
    prev_w = w;
  }
  std::string detail = "boundary g mu_B A_y^2/hbar = " + fmt(boundary) + " T/s; radicand sign vs algebra: " +
                       (sign_agrees ? "agree" : "DISAGREE");
  detail += zero_beyond ? "; zero beyond boundary" : "; window is positive beyond the boundary (first at C_z = " +
                                                         fmt(first_positive_beyond) + " x boundary) and zero below it";
  detail += decreasing ? "; decreasing where positive"
                       : "; window increases from the boundary up to C_z = 1.5^1.5 x boundary (first rise at " +
                             fmt(first_increase) + " x) and decreases only after that";
  return {sign_agrees && zero_beyond && decreasing, detail};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria{
    {"multilevel matrix equals Wigner-d oracle", criterion_1},
    {"doubly stochastic and symmetric", criterion_2},
    {"spin-1/2 numeric flip matches exp(-K A_y^2/C_z)", criterion_3},
    {"spin-2 numeric matches multilevel matrix", criterion_4},
    {"turn-off series endpoints", criterion_5},
    {"symmetry from m0 = 0", criterion_6},
    {"monotone trend over the turn-off series", criterion_7},
    {"rotation-frequency ordering and transition period", criterion_8},
    {"norm conservation", criterion_9},
    {"transition window properties", criterion_10},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--only N]\n";
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(kCriteria.size())) {
    std::cerr << "criterion must be 1.." << kCriteria.size() << '\n';
    return 2;
  }
  int failures = 0;
  for (std::size_t i = 0; i < kCriteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (only && n != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = kCriteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.passed) ++failures;
    std::printf("criterion %2d %s  %-48s [%.2f s]  %s\n", n, o.passed ? "PASS" : "FAIL", kCriteria[i].first.c_str(),
                secs, o.summary.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
