#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cctype>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "irbmr/report.hpp"

using namespace irbmr;

namespace {

Report sample_report() {
  Report r;
  r.meta.emplace_back("command", "demo");
  r.meta.emplace_back("alpha", "0.999");
  Table t;
  t.title = "demo table";
  t.columns = {"add-on", "capital", "count", "label"};
  t.rows.push_back({"row, one",
                    {Cell::pct(0.1222), Cell::num(0.086689, Unit::fraction),
                     Cell::count(37), Cell::str("x\"y")}});
  t.rows.push_back({"row two",
                    {Cell::num(0.50020581329), Cell::num(5.9639e-07),
                     Cell::count(-1), Cell::str("plain")}});
  r.tables.push_back(std::move(t));
  r.notes.push_back("a note");
  return r;
}

std::string formatted(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

TEST_CASE("text rendering applies display units") {
  const std::string text = to_text(sample_report());
  CHECK(text.find("command: demo") != std::string::npos);
  CHECK(text.find("demo table") != std::string::npos);
  CHECK(text.find("12.22%") != std::string::npos);   // percent, 2 decimals
  CHECK(text.find("0.0867") != std::string::npos);   // fraction, 4 decimals
  CHECK(text.find("37") != std::string::npos);
  CHECK(text.find("5.9639e-07") != std::string::npos);  // dimensionless %.6g
  CHECK(text.find("note: a note") != std::string::npos);
}

TEST_CASE("json carries full precision and explicit units") {
  const Report report = sample_report();
  const std::string js = to_json(report);
  const nlohmann::json root = nlohmann::json::parse(js);

  CHECK(root["meta"]["command"] == "demo");
  const auto& rows = root["tables"][0]["rows"];
  REQUIRE(rows.size() == 2);

  const auto& c0 = rows[0]["cells"];
  CHECK(c0[0]["unit"] == "percent");
  // Percent cells are scaled to percent points, exactly.
  CHECK(c0[0]["value"].get<double>() == 0.1222 * 100.0);
  CHECK(c0[1]["unit"] == "fraction");
  CHECK(c0[1]["value"].get<double>() == 0.086689);
  CHECK(c0[2]["unit"] == "count");
  CHECK(c0[2]["value"].get<long long>() == 37);
  CHECK(c0[3]["unit"] == "text");
  CHECK(c0[3]["value"] == "x\"y");

  const auto& c1 = rows[1]["cells"];
  CHECK(c1[0]["unit"] == "real");
  CHECK(c1[0]["value"].get<double>() == 0.50020581329);
  CHECK(root["notes"][0] == "a note");
}

TEST_CASE("table and json show the same numbers at display precision") {
  const Report report = sample_report();
  const std::string text = to_text(report);
  const nlohmann::json root = nlohmann::json::parse(to_json(report));
  const auto& c0 = root["tables"][0]["rows"][0]["cells"];

  const std::string pct =
      formatted("%.2f", c0[0]["value"].get<double>()) + "%";
  CHECK(text.find(pct) != std::string::npos);
  const std::string frac = formatted("%.4f", c0[1]["value"].get<double>());
  CHECK(text.find(frac) != std::string::npos);
}

TEST_CASE("csv is long-format with one value per line") {
  const std::string csv = to_csv(sample_report());
  CHECK(csv.rfind("section,row,column,value,unit\n", 0) == 0);
  CHECK(csv.find("meta,command,,demo,text\n") != std::string::npos);
  CHECK(csv.find("demo table,\"row, one\",add-on,12.22") !=
        std::string::npos);
  CHECK(csv.find(",percent\n") != std::string::npos);
  // Quote escaping of embedded quotes.
  CHECK(csv.find("\"x\"\"y\"") != std::string::npos);
  CHECK(csv.find("note,,,a note,text\n") != std::string::npos);
}

TEST_CASE("csv percent values are full precision in display units") {
  Report r;
  Table t;
  t.title = "t";
  t.columns = {"v"};
  t.rows.push_back({"r", {Cell::pct(0.38481234567890123)}});
  r.tables.push_back(std::move(t));
  const std::string csv = to_csv(r);
  const std::string expect = formatted("%.17g", 0.38481234567890123 * 100.0);
  CHECK(csv.find(expect) != std::string::npos);
}

TEST_CASE("fnv1a matches the published test vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("utc timestamp has the iso-8601 shape") {
  const std::string ts = utc_timestamp();
  REQUIRE(ts.size() == 20);
  CHECK(ts[4] == '-');
  CHECK(ts[7] == '-');
  CHECK(ts[10] == 'T');
  CHECK(ts[13] == ':');
  CHECK(ts[16] == ':');
  CHECK(ts[19] == 'Z');
  for (int i : {0, 1, 2, 3, 5, 6, 8, 9, 11, 12, 14, 15, 17, 18}) {
    CHECK(std::isdigit(static_cast<unsigned char>(ts[static_cast<std::size_t>(i)])));
  }
}
