#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "irbmr/mc_engine.hpp"
#include "irbmr/stats.hpp"

namespace irbmr {

enum class Grade { all_ratings, speculative };

const char* grade_name(Grade g);

// One calendar year of observed rates. The pd columns are optional so a
// panel can carry a single grade.
struct PanelRow {
  int year = 0;
  double lgd_rate = 0.0;
  std::optional<double> pd_all_ratings;
  std::optional<double> pd_speculative;
};

struct RatePanel {
  std::vector<PanelRow> rows;
  std::string source_label;
  std::vector<std::string> warnings;  // year gaps, pd ordering oddities
};

// Reads and validates a panel from a CSV file with header
// `year,lgd_rate,pd_all_ratings,pd_speculative`. Rates are decimals or
// percent strings ("55.26%"); either pd field may be empty. Parse and
// validation failures throw validation_error with line numbers; missing
// files throw io_error.
RatePanel load_panel(const std::string& path);

// Same parser over an already-open stream; label names the source in
// diagnostics.
RatePanel parse_panel(std::istream& in, const std::string& label);

// Serializes with enough digits that load_panel(write_panel(p)) reproduces
// every value bit-exactly.
void write_panel(const RatePanel& panel, const std::string& path);
std::string panel_to_csv(const RatePanel& panel);

// Sample-moment targets for one grade's default threshold series
// k = Phi^{-1}(pd).
struct GradeTargets {
  double k_mean = 0.0;
  double k_std = 0.0;
  double corr_lgd_k = 0.0;
};

struct PanelTargets {
  int n_years = 0;
  int first_year = 1983;
  double lgd_mean = 0.0;
  double lgd_std = 0.0;
  GradeTargets all_ratings;
  GradeTargets speculative;
};

// Generates a synthetic panel whose sample mean and standard deviation of
// lgd and of each k series, and the sample lgd-k correlations, hit the
// targets exactly (up to roundoff): Gaussian draws are orthonormalized with
// Gram-Schmidt and recombined, so the match is affine rather than
// asymptotic. Throws validation_error for infeasible targets.
RatePanel synthesize_panel(const PanelTargets& targets, std::uint64_t seed);

// Column extractors. pd_series requires the grade to be present in every
// row and applies no transformation (rates, not thresholds).
SampleSeries lgd_series(const RatePanel& panel);
SampleSeries pd_series(const RatePanel& panel, Grade grade);

// End-to-end run settings shared by the CLI commands.
struct RunConfig {
  std::string input_path;
  Grade grade = Grade::all_ratings;
  double alpha = 0.999;
  std::int64_t n_sim = 1'000'000;
  std::uint64_t seed = 1;
  int n_obligors = 0;  // 0 = asymptotic
  bool clamp_lgd = false;
  RhoMode rho_mode = RhoMode::of_realized_pd;
  KHatMethod k_hat_method = KHatMethod::quadrature;
  int threads = 1;
  std::string format = "table";  // table | json | csv
  std::string out_path;          // empty = stdout
};

// Checks ranges and returns advisory warnings (e.g. a nonstandard alpha).
// Hard violations throw validation_error.
std::vector<std::string> validate(const RunConfig& cfg);

}  // namespace irbmr
