#pragma once

#include <string>
#include <utility>
#include <vector>

namespace irbmr {

// Unit tags travel with every numeric cell so percent and fraction columns
// can never be confused in any output mode.
enum class Unit { none, fraction, percent, count };

struct Cell {
  enum class Kind { number, integer, text };
  Kind kind = Kind::text;
  double number = 0.0;
  long long integer = 0;
  Unit unit = Unit::none;
  std::string text;

  static Cell num(double value, Unit unit = Unit::none);
  // Stored as a fraction; rendered scaled by 100 with a percent marker.
  static Cell pct(double fraction_value);
  static Cell count(long long value);
  static Cell str(std::string value);
};

struct TableRow {
  std::string label;
  std::vector<Cell> cells;
};

struct Table {
  std::string title;
  std::vector<std::string> columns;  // excluding the row-label column
  std::vector<TableRow> rows;
};

struct Report {
  std::vector<std::pair<std::string, std::string>> meta;  // ordered key/value
  std::vector<Table> tables;
  std::vector<std::string> notes;
};

// Human-readable fixed-width tables. Percents with 2 decimals, fractions
// with 4, dimensionless numbers with up to 6 significant digits.
std::string to_text(const Report& report);

// Machine output with full stored precision; cells carry value and unit,
// percent cells scaled to percent points.
std::string to_json(const Report& report);
std::string to_csv(const Report& report);

// 64-bit FNV-1a digest as 16 hex characters; used to fingerprint inputs in
// report metadata.
std::string fnv1a_hex(const std::string& bytes);

// UTC timestamp, ISO 8601 seconds resolution.
std::string utc_timestamp();

}  // namespace irbmr
