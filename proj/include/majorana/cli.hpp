#pragma once

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "majorana/analytic.hpp"
#include "majorana/experiments.hpp"
#include "majorana/io/csv.hpp"
#include "majorana/io/run_config.hpp"
#include "majorana/io/svg_plot.hpp"
#include "majorana/propagator.hpp"
#include "majorana/validation.hpp"

namespace majorana::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationFailure = 1,
  kConfigError = 2,
  kAllDegenerate = 3,
  kIntegratorFailure = 4,
};

/// Destination for CSV output: a file, or the supplied stream when no path.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("out", "cannot write '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

inline std::vector<int> descending_two_m(const SpinSystem& sys) {
  std::vector<int> ms;
  for (int k = 0; k < sys.dimension(); ++k) ms.push_back(sys.two_m_at(k));
  return ms;
}

inline std::string optional_cell(double v) { return std::isnan(v) ? std::string() : io::CsvWriter::cell(v); }

inline void plot_distributions(const io::RunConfig& config, const SweepResult& sweep, bool numeric,
                               const std::string& title) {
  std::vector<io::Series> series;
  const auto ms = descending_two_m(config.sys);
  for (std::size_t k = 0; k < ms.size(); ++k) {
    io::Series s;
    s.label = "m=" + io::format_two_m(ms[k]) + (numeric ? " numeric" : "");
    for (const SweepRecord& r : sweep.records) {
      const RVector& v = numeric ? r.numeric : r.analytic;
      if (v.size() == 0) continue;
      s.x.push_back(r.tau_i * 1e6);
      s.y.push_back(v(static_cast<Eigen::Index>(k)));
    }
    series.push_back(std::move(s));
  }
  io::write_svg(config.plot, {title, "tau_i (us)", "population", true}, series);
}

/// One CSV row per (tau_i, m) from the closed-form route.
inline int cmd_analytic(const io::RunConfig& config, std::ostream& out, std::ostream& err) {
  SweepConfig sc = config.sweep_config();
  sc.engines = Engines::AnalyticOnly;
  const SweepResult sweep = sweep_tau_i(sc);

  Sink sink(config.out, out);
  io::CsvWriter csv(sink.stream(), config,
                    {"tau_i_s", "m", "probability", "theta_rad", "flip_p", "f_rot_hz", "window_s"});
  const auto ms = descending_two_m(config.sys);
  for (const SweepRecord& r : sweep.records) {
    if (!r.error.empty() && r.reversal) err << "tau_i=" << r.tau_i << " s: " << r.error << '\n';
    for (std::size_t k = 0; k < ms.size(); ++k) {
      const double p = r.analytic.size() ? r.analytic(static_cast<Eigen::Index>(k)) : std::nan("");
      csv.row({io::CsvWriter::cell(r.tau_i), io::m_cell(ms[k]), optional_cell(p), io::CsvWriter::cell(r.theta),
               io::CsvWriter::cell(r.flip_p), optional_cell(r.f_rot_at_reversal), optional_cell(r.window)});
    }
  }
  if (!config.plot.empty()) plot_distributions(config, sweep, false, "Analytic populations vs tau_i");
  if (sweep.all_degenerate()) {
    err << "no tau_i value produces a field reversal\n";
    return kAllDegenerate;
  }
  return kOk;
}

/// Field ramp used by `simulate`: f_rot, then C_z, then the first tau_i.
inline FieldModel simulation_model(const io::RunConfig& config) {
  if (config.f_rot) return ramp_for_rotation_frequency(config.field, *config.f_rot);
  if (config.c_z) {
    return FieldModel::from_linear(config.field.A_y(), config.field.A_z(), *config.c_z, config.field.B_zQ,
                                   config.field.tau_q);
  }
  FieldModel m = config.field.with_tau_i(config.tau_i_values.front());
  m.validate();
  return m;
}

inline int cmd_simulate(const io::RunConfig& config, std::ostream& out, std::ostream& err) {
  FieldModel model;
  PropagationSettings settings;
  try {
    model = simulation_model(config);
    settings = config.settings();
    settings.basis_out = config.trace_basis;
    if (!(config.t_start && config.t_end)) {
      const PropagationSettings window = default_settings(config.sys, model, config.adiabaticity);
      settings.t_start = window.t_start;
      settings.t_end = window.t_end;
    }
  } catch (const NoReversal& e) {
    err << "simulate: " << e.what() << '\n';
    return kAllDegenerate;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("field", e.what());
  }

  TimeTrace trace;
  try {
    trace = time_trace(config.sys, model, config.two_m0, settings, config.n_samples);
  } catch (const StepSizeUnderflow& e) {
    err << "integrator failure: " << e.what() << " (t=" << e.time() << " s, h=" << e.step()
        << " s, worst norm drift=" << e.worst_norm_drift() << ")\n";
    return kIntegratorFailure;
  } catch (const DomainError& e) {
    throw ConfigError("t_start", e.what());
  }

  Sink sink(config.out, out);
  std::vector<std::string> header{"t_s", "B_y_T", "B_z_T"};
  const auto ms = descending_two_m(config.sys);
  for (int two_m : ms) header.push_back("p_" + io::m_label(two_m));
  io::CsvWriter csv(sink.stream(), config, header);
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    std::vector<std::string> row{io::CsvWriter::cell(trace.times[i]), io::CsvWriter::cell(trace.field_snapshots[i].y()),
                                 io::CsvWriter::cell(trace.field_snapshots[i].z())};
    for (Eigen::Index k = 0; k < trace.populations.cols(); ++k) {
      row.push_back(io::CsvWriter::cell(trace.populations(static_cast<Eigen::Index>(i), k)));
    }
    csv.row(row);
  }
  err << "f_rot at reversal = " << rotation_frequency(model, reversal_time(model)) << " Hz, f_Lar = "
      << larmor_frequency(config.sys, model.A_y()) << " Hz, worst norm drift = "
      << trace.diagnostics.worst_norm_drift << '\n';

  if (!config.plot.empty()) {
    std::vector<io::Series> series;
    for (std::size_t k = 0; k < ms.size(); ++k) {
      io::Series s;
      s.label = "|c(" + io::format_two_m(ms[k]) + ")|^2";
      for (std::size_t i = 0; i < trace.times.size(); ++i) {
        s.x.push_back(trace.times[i] * 1e6);
        s.y.push_back(trace.populations(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
      }
      series.push_back(std::move(s));
    }
    io::write_svg(config.plot, {"Populations vs time", "t (us)", "population", false}, series);
  }
  return kOk;
}

inline int cmd_sweep(const io::RunConfig& config, std::ostream& out, std::ostream& err) {
  const SweepConfig sc = config.sweep_config();
  const SweepResult sweep = sweep_tau_i(sc);

  Sink sink(config.out, out);
  io::CsvWriter csv(sink.stream(), config, {"tau_i_s", "m", "p_analytic", "p_numeric", "abs_diff"});
  const auto ms = descending_two_m(config.sys);
  bool integrator_failed = false;
  double worst = 0.0;
  for (const SweepRecord& r : sweep.records) {
    integrator_failed |= r.integrator_failed;
    for (std::size_t k = 0; k < ms.size(); ++k) {
      const auto idx = static_cast<Eigen::Index>(k);
      const bool has_a = r.analytic.size() > idx;
      const bool has_n = r.numeric.size() > idx;
      std::string diff;
      if (has_a && has_n) {
        const double d = std::abs(r.analytic(idx) - r.numeric(idx));
        worst = std::max(worst, d);
        diff = io::CsvWriter::cell(d);
      }
      csv.row({io::CsvWriter::cell(r.tau_i), io::m_cell(ms[k]), has_a ? io::CsvWriter::cell(r.analytic(idx)) : "",
               has_n ? io::CsvWriter::cell(r.numeric(idx)) : "", diff});
    }
  }

  err << "tau_i (s)               max |analytic - numeric|  status\n";
  for (const SweepRecord& r : sweep.records) {
    err << std::setw(24) << std::left << io::format_number(r.tau_i);
    if (r.analytic.size() && r.numeric.size()) {
      const double d = (r.analytic - r.numeric).cwiseAbs().maxCoeff();
      err << std::setw(26) << io::format_number(d) << (d > kEngineDiscrepancyThreshold ? "FLAGGED" : "ok");
    } else {
      err << std::setw(26) << "-" << "-";
    }
    if (!r.error.empty()) err << " (" << r.error << ")";
    err << '\n';
  }
  if (sc.engines == Engines::Both) err << "max abs_diff = " << io::format_number(worst) << '\n';

  if (!config.plot.empty()) {
    plot_distributions(config, sweep, sc.engines == Engines::NumericOnly, "Populations vs tau_i");
  }
  if (integrator_failed) return kIntegratorFailure;
  if (sweep.all_degenerate()) return kAllDegenerate;
  return kOk;
}

inline int cmd_validate(const io::RunConfig& config, std::ostream& out) {
  ValidationInputs in;
  in.sys = config.sys;
  in.field = config.field;
  in.K = config.effective_K();
  in.rel_tol = config.rel_tol;
  in.abs_tol = config.abs_tol;
  in.adiabaticity = config.adiabaticity;
  const auto results = run_invariant_suite(in);
  bool all = true;
  for (const CheckResult& r : results) {
    all &= r.passed;
    out << (r.passed ? "PASS  " : "FAIL  ") << std::setw(58) << std::left << r.name << " value="
        << io::format_number(r.value);
    if (r.threshold > 0) out << " bound=" << io::format_number(r.threshold);
    if (!r.detail.empty()) out << "  [" << r.detail << "]";
    out << '\n';
  }
  out << (all ? "all invariants hold\n" : "invariant failures detected\n");
  return all ? kOk : kValidationFailure;
}

}  // namespace majorana::cli
