#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "majorana/io/run_config.hpp"
#include "majorana/io/units.hpp"

namespace majorana::io {

/// Comma-separated output with LF line endings. Every file opens with the
/// configuration echo as `# key=value` comment lines.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const RunConfig& config, const std::vector<std::string>& header) : out_(out) {
    out_ << kEchoMarker << '\n';
    for (const auto& [k, v] : echo(config)) out_ << "# " << k << '=' << v << '\n';
    write_fields(header);
  }

  /// Cells are preformatted; use cell() for numbers.
  void row(const std::vector<std::string>& cells) { write_fields(cells); }

  static std::string cell(double v) { return format_number(v); }

 private:
  void write_fields(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << quote(fields[i]);
    }
    out_ << '\n';
  }

  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + '"';
  }

  std::ostream& out_;
};

/// Column label for a magnetic quantum number: 2 -> "m2", -1 -> "mm1",
/// 1/2 -> "m1_2", -3/2 -> "mm3_2".
inline std::string m_label(int two_m) {
  const int mag = two_m < 0 ? -two_m : two_m;
  std::string s = two_m < 0 ? "mm" : "m";
  if (mag % 2 == 0) return s + std::to_string(mag / 2);
  return s + std::to_string(mag) + "_2";
}

/// Numeric m for CSV cells: integers plain, half-integers as decimals.
inline std::string m_cell(int two_m) {
  if (two_m % 2 == 0) return std::to_string(two_m / 2);
  return format_number(0.5 * two_m);
}

}  // namespace majorana::io
