#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace multiop {

inline constexpr const char* kCodeVersion = "0.1.0";

/// One table value: integer, real, or tag (e.g. a failure status).
using CellValue = std::variant<std::int64_t, double, std::string>;

/// Shortest round-trip decimal form, locale-independent ('.' decimal point);
/// integral values print without an exponent or trailing zeros.
std::string format_double(double v);

struct Provenance {
  std::string experiment;
  std::string config_hash;
  std::uint64_t seed = 0;
  /// Canonical JSON of the effective config; embedded in JSON output when
  /// nonempty.
  std::string config_canonical;
};

/// Grid results keyed by their parameter columns, with enough provenance to
/// replay the run. Emission is byte-stable: fixed column order, fixed number
/// formatting, '\n' line ends.
class ResultTable {
public:
  ResultTable(std::vector<std::string> columns, Provenance provenance);

  void add_row(std::vector<CellValue> row);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<CellValue>>& rows() const { return rows_; }
  const Provenance& provenance() const { return provenance_; }

  void emit_csv(std::ostream& out) const;
  void emit_json(std::ostream& out) const;

  enum class Format { csv, json };
  /// Writes the table to `path`; format chosen by extension (.json → JSON,
  /// anything else → CSV) unless forced.
  void emit(const std::string& path) const;
  void emit(const std::string& path, Format format) const;

private:
  std::vector<std::string> columns_;
  std::vector<std::vector<CellValue>> rows_;
  Provenance provenance_;
};

} // namespace multiop
