#include "irbmr/data_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "irbmr/errors.hpp"
#include "irbmr/normal.hpp"
#include "irbmr/rng.hpp"

namespace irbmr {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  double value = 0.0;
  const char* begin = t.data();
  const char* end = begin + t.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || t.empty()) {
    throw validation_error(where + ": cannot parse number '" + text + "'");
  }
  return value;
}

// A rate cell holds a decimal ("0.5526"), a percent ("55.26%"), or nothing.
std::optional<double> parse_rate(const std::string& text,
                                 const std::string& where) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  if (t.back() == '%') {
    return parse_double(t.substr(0, t.size() - 1), where) / 100.0;
  }
  return parse_double(t, where);
}

int parse_year(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  int value = 0;
  const char* begin = t.data();
  const char* end = begin + t.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || t.empty()) {
    throw validation_error(where + ": cannot parse year '" + text + "'");
  }
  return value;
}

void check_rate_bounds(const std::optional<double>& rate, const char* column,
                       const std::string& where, int year,
                       std::vector<std::string>& violations) {
  if (rate && !(*rate >= 0.0 && *rate <= 1.0)) {
    char buf[200];
    std::snprintf(buf, sizeof(buf), "%s: year %d: %s = %.17g outside [0, 1]",
                  where.c_str(), year, column, *rate);
    violations.emplace_back(buf);
  }
}

std::string format_rate(const std::optional<double>& rate) {
  if (!rate) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", *rate);
  return buf;
}

// Centers a vector and rescales it to zero sample mean and unit sample
// standard deviation (n - 1 convention).
void standardize_inplace(std::vector<double>& v) {
  const std::size_t n = v.size();
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double& x : v) {
    x -= mean;
    ss += x * x;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) {
    throw std::runtime_error("synthesize_panel: degenerate draw direction");
  }
  for (double& x : v) x /= sd;
}

// Removes the component of v along u (both centered), in the sample inner
// product.
void orthogonalize_against(std::vector<double>& v,
                           const std::vector<double>& u) {
  double vu = 0.0;
  double uu = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    vu += v[i] * u[i];
    uu += u[i] * u[i];
  }
  const double coef = vu / uu;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= coef * u[i];
}

}  // namespace

const char* grade_name(Grade g) {
  return g == Grade::all_ratings ? "all_ratings" : "speculative";
}

RatePanel parse_panel(std::istream& in, const std::string& label) {
  RatePanel panel;
  panel.source_label = label;

  std::string line;
  int line_no = 0;
  bool saw_header = false;
  std::vector<std::string> violations;
  std::vector<std::string> row_where;  // source location of each kept row

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    if (!saw_header) {
      const auto fields = split_csv_line(line);
      if (fields.size() != 4 || trim(fields[0]) != "year" ||
          trim(fields[1]) != "lgd_rate" ||
          trim(fields[2]) != "pd_all_ratings" ||
          trim(fields[3]) != "pd_speculative") {
        throw validation_error(
            label + ":" + std::to_string(line_no) +
            ": expected header 'year,lgd_rate,pd_all_ratings,pd_speculative'");
      }
      saw_header = true;
      continue;
    }

    const std::string where = label + ":" + std::to_string(line_no);
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      throw validation_error(where + ": expected 4 comma-separated fields, got " +
                             std::to_string(fields.size()));
    }

    PanelRow row;
    row.year = parse_year(fields[0], where);
    const auto lgd = parse_rate(fields[1], where);
    if (!lgd) {
      throw validation_error(where + ": lgd_rate must not be empty");
    }
    row.lgd_rate = *lgd;
    row.pd_all_ratings = parse_rate(fields[2], where);
    row.pd_speculative = parse_rate(fields[3], where);

    if (!panel.rows.empty()) {
      const int prev = panel.rows.back().year;
      if (row.year == prev) {
        throw validation_error(where + ": duplicate year " +
                               std::to_string(row.year));
      }
      if (row.year < prev) {
        throw validation_error(where + ": years must be strictly increasing (" +
                               std::to_string(row.year) + " after " +
                               std::to_string(prev) + ")");
      }
      if (row.year != prev + 1) {
        panel.warnings.push_back("gap in years between " +
                                 std::to_string(prev) + " and " +
                                 std::to_string(row.year));
      }
    }
    panel.rows.push_back(row);
    row_where.push_back(where);
  }

  if (!saw_header) {
    throw validation_error(label + ": empty file (missing header)");
  }
  if (panel.rows.empty()) {
    throw validation_error(label + ": no data rows after the header");
  }

  for (std::size_t i = 0; i < panel.rows.size(); ++i) {
    const PanelRow& row = panel.rows[i];
    const std::string& at = row_where[i];
    std::optional<double> lgd = row.lgd_rate;
    check_rate_bounds(lgd, "lgd_rate", at, row.year, violations);
    check_rate_bounds(row.pd_all_ratings, "pd_all_ratings", at, row.year,
                      violations);
    check_rate_bounds(row.pd_speculative, "pd_speculative", at, row.year,
                      violations);
    if (row.pd_all_ratings && row.pd_speculative &&
        *row.pd_speculative < *row.pd_all_ratings) {
      panel.warnings.push_back(
          "year " + std::to_string(row.year) +
          ": pd_speculative below pd_all_ratings (unusual ordering)");
    }
  }
  if (!violations.empty()) {
    std::string msg = label + ": rate bounds violated:";
    for (const std::string& v : violations) msg += "\n  " + v;
    throw validation_error(msg);
  }
  return panel;
}

RatePanel load_panel(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw io_error("load_panel: cannot open '" + path + "' for reading");
  }
  return parse_panel(in, path);
}

std::string panel_to_csv(const RatePanel& panel) {
  std::ostringstream out;
  out << "year,lgd_rate,pd_all_ratings,pd_speculative\n";
  for (const PanelRow& row : panel.rows) {
    std::optional<double> lgd = row.lgd_rate;
    out << row.year << ',' << format_rate(lgd) << ','
        << format_rate(row.pd_all_ratings) << ','
        << format_rate(row.pd_speculative) << '\n';
  }
  return out.str();
}

void write_panel(const RatePanel& panel, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw io_error("write_panel: cannot open '" + path + "' for writing");
  }
  out << panel_to_csv(panel);
  if (!out) {
    throw io_error("write_panel: failed writing '" + path + "'");
  }
}

RatePanel synthesize_panel(const PanelTargets& targets, std::uint64_t seed) {
  const int n = targets.n_years;
  if (n < 4) {
    throw validation_error(
        "synthesize_panel: need at least 4 years to pin three directions");
  }
  if (!(targets.lgd_std > 0.0) || !(targets.all_ratings.k_std > 0.0) ||
      !(targets.speculative.k_std > 0.0)) {
    throw validation_error(
        "synthesize_panel: standard deviation targets must be positive");
  }
  for (double c :
       {targets.all_ratings.corr_lgd_k, targets.speculative.corr_lgd_k}) {
    if (!(c > -1.0 && c < 1.0)) {
      throw validation_error(
          "synthesize_panel: correlation targets must lie strictly in "
          "(-1, 1)");
    }
  }

  // Draws are redone with a chained seed when the lgd leg leaves [0, 1], so
  // the output always validates. Typically the first attempt passes.
  for (int attempt = 0; attempt < 64; ++attempt) {
    NormalStream rng(derive_stream_seed(seed, 0x9a7e1u, attempt));

    std::vector<double> u0(n), u1(n), u2(n);
    for (int i = 0; i < n; ++i) u0[i] = rng.normal();
    for (int i = 0; i < n; ++i) u1[i] = rng.normal();
    for (int i = 0; i < n; ++i) u2[i] = rng.normal();

    standardize_inplace(u0);
    orthogonalize_against(u1, u0);
    standardize_inplace(u1);
    orthogonalize_against(u2, u0);
    orthogonalize_against(u2, u1);
    standardize_inplace(u2);

    const double r1 = targets.all_ratings.corr_lgd_k;
    const double r2 = targets.speculative.corr_lgd_k;
    const double q1 = std::sqrt(1.0 - r1 * r1);
    const double q2 = std::sqrt(1.0 - r2 * r2);

    RatePanel panel;
    panel.source_label = "synthetic(seed=" + std::to_string(seed) + ")";
    panel.rows.resize(n);
    bool lgd_in_bounds = true;
    for (int i = 0; i < n; ++i) {
      PanelRow& row = panel.rows[i];
      row.year = targets.first_year + i;
      row.lgd_rate = targets.lgd_mean + targets.lgd_std * u0[i];
      if (!(row.lgd_rate >= 0.0 && row.lgd_rate <= 1.0)) {
        lgd_in_bounds = false;
        break;
      }
      const double k_ar = targets.all_ratings.k_mean +
                          targets.all_ratings.k_std * (r1 * u0[i] + q1 * u1[i]);
      const double k_sg =
          targets.speculative.k_mean +
          targets.speculative.k_std * (r2 * u0[i] + q2 * u2[i]);
      row.pd_all_ratings = norm_cdf(k_ar);
      row.pd_speculative = norm_cdf(k_sg);
    }
    if (lgd_in_bounds) return panel;
  }
  throw validation_error(
      "synthesize_panel: targets keep producing lgd values outside [0, 1]");
}

SampleSeries lgd_series(const RatePanel& panel) {
  SampleSeries s;
  s.label = "lgd_rate";
  for (const PanelRow& row : panel.rows) {
    s.years.push_back(row.year);
    s.values.push_back(row.lgd_rate);
  }
  return s;
}

SampleSeries pd_series(const RatePanel& panel, Grade grade) {
  SampleSeries s;
  s.label = (grade == Grade::all_ratings) ? "pd_all_ratings"
                                          : "pd_speculative";
  std::vector<int> missing;
  for (const PanelRow& row : panel.rows) {
    const std::optional<double>& pd =
        (grade == Grade::all_ratings) ? row.pd_all_ratings
                                      : row.pd_speculative;
    if (!pd) {
      missing.push_back(row.year);
      continue;
    }
    s.years.push_back(row.year);
    s.values.push_back(*pd);
  }
  if (!missing.empty()) {
    std::string msg = "pd_series: column " + std::string(s.label) +
                      " missing for years:";
    for (int y : missing) msg += " " + std::to_string(y);
    throw validation_error(msg);
  }
  return s;
}

std::vector<std::string> validate(const RunConfig& cfg) {
  std::vector<std::string> warnings;
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw validation_error("RunConfig: alpha must lie in (0, 1)");
  }
  if (cfg.alpha != 0.999 && cfg.alpha != 0.99) {
    warnings.push_back(
        "alpha outside the standard policy set {0.99, 0.999}; proceeding");
  }
  if (cfg.n_sim < 1000) {
    throw validation_error("RunConfig: n_sim must be at least 1000");
  }
  if (cfg.n_obligors < 0) {
    throw validation_error("RunConfig: obligors must be >= 0");
  }
  if (cfg.format != "table" && cfg.format != "json" && cfg.format != "csv") {
    throw validation_error("RunConfig: format must be table, json, or csv");
  }
  return warnings;
}

}  // namespace irbmr
