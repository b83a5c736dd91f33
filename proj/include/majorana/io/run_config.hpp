#pragma once

#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "majorana/experiments.hpp"
#include "majorana/io/units.hpp"

namespace majorana::io {

/// Everything a CLI run needs. Physical quantities are held in SI.
struct RunConfig {
  SpinSystem sys{4};
  FieldModel field = [] {
    FieldModel f;
    f.B_yI = 0.3e-4;
    f.B_yQ = 0.2e-4;
    f.B_zI = 50e-4;
    f.B_zQ = 45e-4;
    f.tau_q = 117.7e-6;
    f.tau_i = 117.7e-6;
    f.mode = FieldMode::Linearized;
    return f;
  }();
  std::vector<double> tau_i_values{117.7e-6, 30.3e-6, 16.1e-6, 11.4e-6, 7.7e-6, 5.8e-6, 4.4e-6};
  int two_m0 = 4;
  std::optional<double> K;
  Engines engines = Engines::Both;
  MeasurementBasis basis = MeasurementBasis::FieldAligned;
  MeasurementBasis trace_basis = MeasurementBasis::LabZ;
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  double max_step = std::numeric_limits<double>::infinity();
  double adiabaticity = 1e4;
  std::optional<double> t_start;
  std::optional<double> t_end;
  std::optional<double> f_rot;
  std::optional<double> c_z;
  int n_samples = 2001;
  bool parallel = false;
  // Output locations are not part of the echo.
  std::string out;
  std::string plot;

  PropagationSettings settings() const {
    PropagationSettings s;
    s.rel_tol = rel_tol;
    s.abs_tol = abs_tol;
    s.max_step = max_step;
    s.basis_out = basis;
    if (t_start) s.t_start = *t_start;
    if (t_end) s.t_end = *t_end;
    return s;
  }

  SweepConfig sweep_config() const {
    SweepConfig c;
    c.sys = sys;
    c.base_model = field;
    c.two_m0 = two_m0;
    c.tau_i_values = tau_i_values;
    c.K = K;
    c.settings = settings();
    c.auto_window = !(t_start && t_end);
    c.adiabaticity = adiabaticity;
    c.engines = engines;
    c.parallel = parallel;
    return c;
  }

  double effective_K() const { return K ? *K : default_K(sys); }
};

namespace detail {

inline std::string lower(std::string s) {
  for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

inline std::optional<double> parse_optional(const std::string& key, const std::string& v, Dimension d,
                                            const char* sentinel) {
  if (lower(v) == sentinel) return std::nullopt;
  return parse_quantity(key, v, d);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  const std::string l = lower(v);
  if (l == "true" || l == "yes" || l == "1") return true;
  if (l == "false" || l == "no" || l == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

inline std::string engines_name(Engines e) {
  switch (e) {
    case Engines::AnalyticOnly: return "analytic";
    case Engines::NumericOnly: return "numeric";
    case Engines::Both: return "both";
  }
  return "both";
}

inline std::string basis_name(MeasurementBasis b) { return b == MeasurementBasis::LabZ ? "lab" : "field"; }

inline MeasurementBasis parse_basis(const std::string& key, const std::string& v) {
  const std::string l = lower(v);
  if (l == "lab") return MeasurementBasis::LabZ;
  if (l == "field") return MeasurementBasis::FieldAligned;
  throw ConfigError(key, "expected lab or field, got '" + v + "'");
}

}  // namespace detail

inline Engines parse_engines(const std::string& key, const std::string& v) {
  const std::string l = detail::lower(v);
  if (l == "analytic") return Engines::AnalyticOnly;
  if (l == "numeric") return Engines::NumericOnly;
  if (l == "both") return Engines::Both;
  throw ConfigError(key, "expected analytic, numeric or both, got '" + v + "'");
}

/// Applies one `key = value` assignment. Unknown keys are rejected.
inline void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string v(trim(raw));
  using detail::parse_optional;
  if (key == "spin") {
    const int two_j = parse_two_m(key, v);
    if (two_j < 1 || two_j > kMaxTwoJ) throw ConfigError(key, "spin must be in [1/2, 20], got '" + v + "'");
    c.sys.two_J = two_j;
  } else if (key == "g_factor") {
    c.sys.g_factor = parse_number(key, v);
  } else if (key == "mu_B") {
    c.sys.mu_B = parse_quantity(key, v, Dimension::MagneticMoment);
  } else if (key == "hbar") {
    c.sys.hbar = parse_quantity(key, v, Dimension::Action);
  } else if (key == "B_yI") {
    c.field.B_yI = parse_quantity(key, v, Dimension::Field);
  } else if (key == "B_yQ") {
    c.field.B_yQ = parse_quantity(key, v, Dimension::Field);
  } else if (key == "B_zI") {
    c.field.B_zI = parse_quantity(key, v, Dimension::Field);
  } else if (key == "B_zQ") {
    c.field.B_zQ = parse_quantity(key, v, Dimension::Field);
  } else if (key == "tau_q") {
    c.field.tau_q = parse_quantity(key, v, Dimension::Time);
  } else if (key == "tau_i") {
    c.tau_i_values = parse_quantity_list(key, v, Dimension::Time);
  } else if (key == "field_mode") {
    const std::string l = detail::lower(v);
    if (l == "linearized") c.field.mode = FieldMode::Linearized;
    else if (l == "exponential") c.field.mode = FieldMode::ExactExponential;
    else throw ConfigError(key, "expected linearized or exponential, got '" + v + "'");
  } else if (key == "m0") {
    c.two_m0 = parse_two_m(key, v);
  } else if (key == "K") {
    c.K = parse_optional(key, v, Dimension::InverseFieldTime, "default");
  } else if (key == "engines") {
    c.engines = parse_engines(key, v);
  } else if (key == "basis") {
    c.basis = detail::parse_basis(key, v);
  } else if (key == "trace_basis") {
    c.trace_basis = detail::parse_basis(key, v);
  } else if (key == "rel_tol") {
    c.rel_tol = parse_number(key, v);
  } else if (key == "abs_tol") {
    c.abs_tol = parse_number(key, v);
  } else if (key == "max_step") {
    const auto step = parse_optional(key, v, Dimension::Time, "inf");
    c.max_step = step ? *step : std::numeric_limits<double>::infinity();
  } else if (key == "adiabaticity") {
    c.adiabaticity = parse_number(key, v);
  } else if (key == "t_start") {
    c.t_start = parse_optional(key, v, Dimension::Time, "auto");
  } else if (key == "t_end") {
    c.t_end = parse_optional(key, v, Dimension::Time, "auto");
  } else if (key == "f_rot") {
    c.f_rot = parse_optional(key, v, Dimension::Frequency, "none");
  } else if (key == "C_z") {
    c.c_z = parse_optional(key, v, Dimension::FieldRate, "none");
  } else if (key == "n_samples") {
    const double n = parse_number(key, v);
    if (n != std::floor(n) || n < 2 || n > 1e8) throw ConfigError(key, "expected an integer >= 2, got '" + v + "'");
    c.n_samples = static_cast<int>(n);
  } else if (key == "parallel") {
    c.parallel = detail::parse_bool(key, v);
  } else if (key == "out") {
    c.out = v;
  } else if (key == "plot") {
    c.plot = v;
  } else {
    throw ConfigError(key, "unknown configuration key");
  }
}

/// Cross-field checks run after all assignments are in.
inline void validate(const RunConfig& c) {
  auto wrap = [](const char* field, const std::function<void()>& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(field, e.what());
    }
  };
  wrap("spin", [&] { c.sys.validate(); });
  if (!c.sys.valid_two_m(c.two_m0)) {
    throw ConfigError("m0", format_two_m(c.two_m0) + " is not a state of spin " + format_two_m(c.sys.two_J));
  }
  if (c.tau_i_values.empty()) throw ConfigError("tau_i", "at least one value is required");
  for (double t : c.tau_i_values) {
    if (!(t > 0)) throw ConfigError("tau_i", "values must be positive");
  }
  if (!(c.field.tau_q > 0)) throw ConfigError("tau_q", "must be positive");
  for (auto [name, value] : {std::pair{"B_yI", c.field.B_yI}, std::pair{"B_yQ", c.field.B_yQ},
                             std::pair{"B_zI", c.field.B_zI}, std::pair{"B_zQ", c.field.B_zQ}}) {
    if (value < 0) throw ConfigError(name, "must be non-negative");
  }
  if (!(c.field.A_y() > 0)) throw ConfigError("B_yI", "B_yI + B_yQ must be positive");
  auto tol_ok = [](double t) { return t > 0 && t <= 1e-3; };
  if (!tol_ok(c.rel_tol)) throw ConfigError("rel_tol", "must lie in (0, 1e-3]");
  if (!tol_ok(c.abs_tol)) throw ConfigError("abs_tol", "must lie in (0, 1e-3]");
  if (!(c.max_step > 0)) throw ConfigError("max_step", "must be positive");
  if (!(c.adiabaticity > 0)) throw ConfigError("adiabaticity", "must be positive");
  if (c.t_start.has_value() != c.t_end.has_value()) {
    throw ConfigError(c.t_start ? "t_end" : "t_start", "t_start and t_end must be given together");
  }
  if (c.t_start && *c.t_end < *c.t_start) throw ConfigError("t_end", "must not precede t_start");
  if (c.K && !(*c.K >= 0)) throw ConfigError("K", "must be non-negative");
  if (c.f_rot && !(*c.f_rot > 0)) throw ConfigError("f_rot", "must be positive");
  if (c.c_z && !(*c.c_z > 0)) throw ConfigError("C_z", "must be positive");
}

inline std::pair<std::string, std::string> split_assignment(const std::string& line, const std::string& where) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) throw ConfigError(where, "expected key = value, got '" + line + "'");
  std::string key(trim(std::string_view(line).substr(0, eq)));
  std::string value(trim(std::string_view(line).substr(eq + 1)));
  if (key.empty()) throw ConfigError(where, "missing key in '" + line + "'");
  return {std::move(key), std::move(value)};
}

inline constexpr const char* kEchoMarker = "# majorana-config";

/// Reads `key = value` lines ('#' starts a comment line). A file that begins
/// with an echo block (as written at the top of every CSV) is read from the
/// echo block instead, up to the first non-comment line.
inline void apply_text(RunConfig& c, std::istream& in, const std::string& source) {
  std::string line;
  bool echo = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t(trim(line));
    if (t == kEchoMarker) {
      echo = true;
      continue;
    }
    if (echo) {
      if (t.rfind("# ", 0) != 0) break;
      const auto [k, v] = split_assignment(t.substr(2), source + ":" + std::to_string(lineno));
      apply_setting(c, k, v);
      continue;
    }
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const auto [k, v] = split_assignment(t, source + ":" + std::to_string(lineno));
    apply_setting(c, k, v);
  }
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  apply_text(base, in, path);
  return base;
}

/// `key=value` override as given on the command line.
inline void apply_override(RunConfig& c, const std::string& assignment) {
  const auto [k, v] = split_assignment(assignment, "--set");
  apply_setting(c, k, v);
}

/// Canonical key/value pairs; reading them back reproduces the same doubles.
inline std::vector<std::pair<std::string, std::string>> echo(const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> kv;
  auto opt = [](const std::optional<double>& v, Dimension d, const char* none) {
    return v ? format_quantity(*v, d) : std::string(none);
  };
  std::string taus;
  for (std::size_t i = 0; i < c.tau_i_values.size(); ++i) {
    taus += (i ? ", " : "") + format_quantity(c.tau_i_values[i], Dimension::Time);
  }
  kv.emplace_back("spin", format_two_m(c.sys.two_J));
  kv.emplace_back("g_factor", format_number(c.sys.g_factor));
  kv.emplace_back("mu_B", format_quantity(c.sys.mu_B, Dimension::MagneticMoment));
  kv.emplace_back("hbar", format_quantity(c.sys.hbar, Dimension::Action));
  kv.emplace_back("B_yI", format_quantity(c.field.B_yI, Dimension::Field));
  kv.emplace_back("B_yQ", format_quantity(c.field.B_yQ, Dimension::Field));
  kv.emplace_back("B_zI", format_quantity(c.field.B_zI, Dimension::Field));
  kv.emplace_back("B_zQ", format_quantity(c.field.B_zQ, Dimension::Field));
  kv.emplace_back("tau_q", format_quantity(c.field.tau_q, Dimension::Time));
  kv.emplace_back("tau_i", taus);
  kv.emplace_back("field_mode", c.field.mode == FieldMode::Linearized ? "linearized" : "exponential");
  kv.emplace_back("m0", format_two_m(c.two_m0));
  kv.emplace_back("K", opt(c.K, Dimension::InverseFieldTime, "default"));
  kv.emplace_back("engines", detail::engines_name(c.engines));
  kv.emplace_back("basis", detail::basis_name(c.basis));
  kv.emplace_back("trace_basis", detail::basis_name(c.trace_basis));
  kv.emplace_back("rel_tol", format_number(c.rel_tol));
  kv.emplace_back("abs_tol", format_number(c.abs_tol));
  kv.emplace_back("max_step", std::isinf(c.max_step) ? "inf" : format_quantity(c.max_step, Dimension::Time));
  kv.emplace_back("adiabaticity", format_number(c.adiabaticity));
  kv.emplace_back("t_start", opt(c.t_start, Dimension::Time, "auto"));
  kv.emplace_back("t_end", opt(c.t_end, Dimension::Time, "auto"));
  kv.emplace_back("f_rot", opt(c.f_rot, Dimension::Frequency, "none"));
  kv.emplace_back("C_z", opt(c.c_z, Dimension::FieldRate, "none"));
  kv.emplace_back("n_samples", std::to_string(c.n_samples));
  kv.emplace_back("parallel", c.parallel ? "true" : "false");
  return kv;
}

}  // namespace majorana::io
