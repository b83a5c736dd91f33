#pragma once

#include <charconv>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "majorana/errors.hpp"

namespace majorana::io {

enum class Dimension { Time, Field, Frequency, FieldRate, InverseFieldTime, MagneticMoment, Action, None };

inline const std::map<std::string, double>& unit_table(Dimension d) {
  static const std::map<std::string, double> time{{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"\u00b5s", 1e-6}, {"ns", 1e-9}};
  static const std::map<std::string, double> field{{"T", 1.0}, {"mT", 1e-3}, {"uT", 1e-6}, {"G", 1e-4}, {"mG", 1e-7}};
  static const std::map<std::string, double> freq{{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
  static const std::map<std::string, double> rate{{"T/s", 1.0}, {"G/s", 1e-4}, {"G/us", 1e2}, {"G/\u00b5s", 1e2}, {"T/us", 1e6}};
  static const std::map<std::string, double> inv{{"/T/s", 1.0}};
  static const std::map<std::string, double> moment{{"J/T", 1.0}};
  static const std::map<std::string, double> action{{"J*s", 1.0}, {"Js", 1.0}};
  static const std::map<std::string, double> none{{"", 1.0}};
  switch (d) {
    case Dimension::Time: return time;
    case Dimension::Field: return field;
    case Dimension::Frequency: return freq;
    case Dimension::FieldRate: return rate;
    case Dimension::InverseFieldTime: return inv;
    case Dimension::MagneticMoment: return moment;
    case Dimension::Action: return action;
    case Dimension::None: return none;
  }
  return none;
}

/// Canonical SI suffix written back when echoing a configuration.
inline std::string si_suffix(Dimension d) {
  switch (d) {
    case Dimension::Time: return "s";
    case Dimension::Field: return "T";
    case Dimension::Frequency: return "Hz";
    case Dimension::FieldRate: return "T/s";
    case Dimension::InverseFieldTime: return "/T/s";
    case Dimension::MagneticMoment: return "J/T";
    case Dimension::Action: return "J*s";
    case Dimension::None: return "";
  }
  return "";
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

/// Shortest-round-trip-safe decimal: 17 significant digits.
inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline double parse_number(const std::string& field, std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ConfigError(field, "expected a number, got '" + std::string(text) + "'");
  }
  return value;
}

/// Parses "<number><unit>" (optional whitespace before the unit) into SI.
inline double parse_quantity(const std::string& field, std::string_view text, Dimension dim) {
  const std::string_view t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || !std::isfinite(value)) {
    throw ConfigError(field, "malformed quantity '" + std::string(t) + "'");
  }
  const std::string unit(trim(std::string_view(ptr, static_cast<std::size_t>(t.data() + t.size() - ptr))));
  const auto& table = unit_table(dim);
  const auto it = table.find(unit);
  if (it == table.end()) {
    std::string allowed;
    for (const auto& [k, v] : table) allowed += (allowed.empty() ? "" : ", ") + (k.empty() ? "<none>" : k);
    throw ConfigError(field, "malformed quantity '" + std::string(t) + "' (units: " + allowed + ")");
  }
  return value * it->second;
}

inline std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    parts.push_back(trim(text.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

inline std::vector<double> parse_quantity_list(const std::string& field, std::string_view text, Dimension dim) {
  std::vector<double> values;
  for (std::string_view item : split_list(text)) {
    if (item.empty()) throw ConfigError(field, "empty list entry in '" + std::string(trim(text)) + "'");
    values.push_back(parse_quantity(field, item, dim));
  }
  return values;
}

inline std::string format_quantity(double value, Dimension dim) { return format_number(value) + si_suffix(dim); }

/// "2", "-1", "1/2", "-3/2" -> twice the value.
inline int parse_two_m(const std::string& field, std::string_view text) {
  text = trim(text);
  const auto slash = text.find('/');
  auto to_int = [&](std::string_view s) {
    int v = 0;
    s = trim(s);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw ConfigError(field, "expected an integer or half-integer like 2 or -3/2, got '" + std::string(text) + "'");
    }
    return v;
  };
  if (slash == std::string_view::npos) return 2 * to_int(text);
  if (to_int(text.substr(slash + 1)) != 2) throw ConfigError(field, "only halves are allowed, got '" + std::string(text) + "'");
  const int numerator = to_int(text.substr(0, slash));
  if (numerator % 2 == 0) throw ConfigError(field, "write integers without a denominator, got '" + std::string(text) + "'");
  return numerator;
}

inline std::string format_two_m(int two_m) {
  if (two_m % 2 == 0) return std::to_string(two_m / 2);
  return std::to_string(two_m) + "/2";
}

}  // namespace majorana::io
