#include "irbmr/report.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <sstream>

#include <json.hpp>

namespace irbmr {

namespace {

std::string format_number(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// Display-mode rendering used by the human table.
std::string cell_text(const Cell& c) {
  switch (c.kind) {
    case Cell::Kind::text:
      return c.text;
    case Cell::Kind::integer:
      return std::to_string(c.integer);
    case Cell::Kind::number:
      break;
  }
  switch (c.unit) {
    case Unit::percent:
      return format_number("%.2f", c.number * 100.0) + "%";
    case Unit::fraction:
      return format_number("%.4f", c.number);
    default:
      return format_number("%.6g", c.number);
  }
}

const char* unit_name(const Cell& c) {
  if (c.kind == Cell::Kind::text) return "text";
  if (c.kind == Cell::Kind::integer) return "count";
  switch (c.unit) {
    case Unit::percent:
      return "percent";
    case Unit::fraction:
      return "fraction";
    case Unit::count:
      return "count";
    default:
      return "real";
  }
}

// Machine-mode value in display units: percent cells are scaled to percent
// points, everything else is passed through at full precision.
double cell_value(const Cell& c) {
  return c.unit == Unit::percent ? c.number * 100.0 : c.number;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

Cell Cell::num(double value, Unit unit) {
  Cell c;
  c.kind = Kind::number;
  c.number = value;
  c.unit = unit;
  return c;
}

Cell Cell::pct(double fraction_value) { return num(fraction_value, Unit::percent); }

Cell Cell::count(long long value) {
  Cell c;
  c.kind = Kind::integer;
  c.integer = value;
  c.unit = Unit::count;
  return c;
}

Cell Cell::str(std::string value) {
  Cell c;
  c.kind = Kind::text;
  c.text = std::move(value);
  return c;
}

std::string to_text(const Report& report) {
  std::ostringstream out;
  for (const auto& [key, value] : report.meta) {
    out << key << ": " << value << '\n';
  }
  for (const Table& table : report.tables) {
    out << '\n' << table.title << '\n';

    std::vector<std::vector<std::string>> grid;
    std::vector<std::string> header;
    header.push_back("");
    for (const std::string& col : table.columns) header.push_back(col);
    grid.push_back(header);
    for (const TableRow& row : table.rows) {
      std::vector<std::string> line;
      line.push_back(row.label);
      for (const Cell& cell : row.cells) line.push_back(cell_text(cell));
      grid.push_back(line);
    }

    std::vector<std::size_t> width;
    for (const auto& line : grid) {
      if (width.size() < line.size()) width.resize(line.size(), 0);
      for (std::size_t i = 0; i < line.size(); ++i) {
        width[i] = std::max(width[i], line[i].size());
      }
    }

    for (const auto& line : grid) {
      for (std::size_t i = 0; i < line.size(); ++i) {
        if (i > 0) out << "  ";
        // Left-align the label column, right-align value columns.
        if (i == 0) {
          out << line[i] << std::string(width[i] - line[i].size(), ' ');
        } else {
          out << std::string(width[i] - line[i].size(), ' ') << line[i];
        }
      }
      out << '\n';
    }
  }
  for (const std::string& note : report.notes) {
    out << "\nnote: " << note << '\n';
  }
  return out.str();
}

std::string to_json(const Report& report) {
  nlohmann::ordered_json root;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report.meta) meta[key] = value;
  root["meta"] = std::move(meta);

  root["tables"] = nlohmann::ordered_json::array();
  for (const Table& table : report.tables) {
    nlohmann::ordered_json jt;
    jt["title"] = table.title;
    jt["columns"] = table.columns;
    jt["rows"] = nlohmann::ordered_json::array();
    for (const TableRow& row : table.rows) {
      nlohmann::ordered_json jr;
      jr["label"] = row.label;
      jr["cells"] = nlohmann::ordered_json::array();
      for (const Cell& cell : row.cells) {
        nlohmann::ordered_json jc;
        if (cell.kind == Cell::Kind::text) {
          jc["value"] = cell.text;
        } else if (cell.kind == Cell::Kind::integer) {
          jc["value"] = cell.integer;
        } else {
          jc["value"] = cell_value(cell);
        }
        jc["unit"] = unit_name(cell);
        jr["cells"].push_back(std::move(jc));
      }
      jt["rows"].push_back(std::move(jr));
    }
    root["tables"].push_back(std::move(jt));
  }
  root["notes"] = report.notes;
  return root.dump(2) + "\n";
}

std::string to_csv(const Report& report) {
  // Long format: one value per line, fully machine-readable even when a
  // table mixes units across columns.
  std::ostringstream out;
  out << "section,row,column,value,unit\n";
  for (const auto& [key, value] : report.meta) {
    out << "meta," << csv_escape(key) << ",," << csv_escape(value) << ",text\n";
  }
  for (const Table& table : report.tables) {
    for (const TableRow& row : table.rows) {
      for (std::size_t i = 0; i < row.cells.size(); ++i) {
        const Cell& cell = row.cells[i];
        const std::string col = i < table.columns.size() ? table.columns[i] : "";
        out << csv_escape(table.title) << ',' << csv_escape(row.label) << ','
            << csv_escape(col) << ',';
        if (cell.kind == Cell::Kind::text) {
          out << csv_escape(cell.text);
        } else if (cell.kind == Cell::Kind::integer) {
          out << cell.integer;
        } else {
          out << format_number("%.17g", cell_value(cell));
        }
        out << ',' << unit_name(cell) << '\n';
      }
    }
  }
  for (const std::string& note : report.notes) {
    out << "note,," << ',' << csv_escape(note) << ",text\n";
  }
  return out.str();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace irbmr
