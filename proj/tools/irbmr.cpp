#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "irbmr/data_io.hpp"
#include "irbmr/errors.hpp"
#include "irbmr/pipeline.hpp"
#include "irbmr/report.hpp"

namespace {

using namespace irbmr;

int parse_obligors(const std::string& text) {
  if (text == "asymptotic") return 0;
  int value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || value < 0) {
    throw validation_error("--obligors expects a non-negative integer or "
                           "'asymptotic', got '" + text + "'");
  }
  return value;
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open input file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw io_error("error while reading input file: " + path);
  return buf.str();
}

std::string moments_fingerprint(const ExplicitMoments& m) {
  char buf[256];
  auto v = [](const std::optional<double>& x) {
    return x ? *x : std::numeric_limits<double>::quiet_NaN();
  };
  std::snprintf(buf, sizeof buf,
                "pd=%.17g;lgd=%.17g;sigma_k=%.17g;sigma_lgd=%.17g;rho=%.17g",
                v(m.pd_hat), v(m.lgd_hat), v(m.sigma_k), v(m.sigma_lgd),
                v(m.rho_lgd_k));
  return buf;
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    if (!std::cout) throw io_error("failed writing to stdout");
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw io_error("cannot open output file: " + out_path);
  out << text;
  out.flush();
  if (!out) throw io_error("failed writing output file: " + out_path);
}

std::string render(const Report& report, const std::string& format) {
  if (format == "json") return to_json(report);
  if (format == "csv") return to_csv(report);
  return to_text(report);
}

int run(int argc, char** argv) {
  CLI::App app{
      "Regulatory credit capital under parameter uncertainty: descriptive "
      "and normality statistics for annual default/loss-rate panels, naive "
      "asymptotic-single-risk-factor capital, and Monte Carlo capital "
      "add-ons for estimation noise and loss-default dependency."};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an ini file (key=value)");

  RunConfig cfg;
  std::string grade_text = "ar";
  std::string obligors_text = "asymptotic";
  std::string rho_mode_text = "realized";
  std::string khat_text = "quadrature";
  double pd_v = 0.0, lgd_v = 0.0, sk_v = 0.0, sl_v = 0.0, rho_v = 0.0;

  app.add_option("--input", cfg.input_path,
                 "CSV panel: year,lgd_rate,pd_all_ratings,pd_speculative");
  app.add_option("--grade", grade_text, "Obligor pool: ar or sg")
      ->check(CLI::IsMember({"ar", "sg", "all_ratings", "speculative"}));
  app.add_option("--alpha", cfg.alpha,
                 "Capital confidence level (default 0.999)");
  app.add_option("--nsim", cfg.n_sim, "Monte Carlo paths (default 1000000)");
  app.add_option("--seed", cfg.seed, "Base random seed (default 1)");
  app.add_option("--obligors", obligors_text,
                 "Portfolio size, or 'asymptotic' for the granular limit");
  app.add_flag("--clamp-lgd", cfg.clamp_lgd,
               "Clamp sampled loss rates into [0, 1]");
  app.add_option("--rho-mode", rho_mode_text,
                 "Asset correlation from the realized or the mean PD")
      ->check(CLI::IsMember({"realized", "mean"}));
  app.add_option("--khat-method", khat_text,
                 "Threshold-location inversion: quadrature or taylor3")
      ->check(CLI::IsMember({"quadrature", "taylor3"}));
  app.add_option("--threads", cfg.threads,
                 "Worker threads; 0 = hardware concurrency (default 1)");
  app.add_option("--format", cfg.format, "Output format: table, json or csv")
      ->check(CLI::IsMember({"table", "json", "csv"}));
  app.add_option("--out", cfg.out_path, "Output path (default stdout)");

  auto* opt_pd = app.add_option("--pd", pd_v, "Override mean default rate");
  auto* opt_lgd = app.add_option("--lgd", lgd_v, "Override mean loss rate");
  auto* opt_sk = app.add_option("--sigma-k", sk_v,
                                "Override std dev of the probit default rate");
  auto* opt_sl = app.add_option("--sigma-lgd", sl_v,
                                "Override std dev of the loss rate");
  auto* opt_rho = app.add_option("--rho-lgd-k", rho_v,
                                 "Override corr(loss rate, probit rate)");

  const char* kCommands[] = {"describe", "normality", "correlate", "qq",
                             "naive",    "capital",   "addon",     "report"};
  const char* kDescriptions[] = {
      "Five-number summaries of the annual rate series",
      "Shapiro-Wilk and joint normality tests of the rate series",
      "Correlation and least-squares fit of loss rate vs probit default rate",
      "Normal quantile-quantile data as plot-ready CSV",
      "Closed-form capital at the point estimates, no uncertainty",
      "Monte Carlo capital with parameter uncertainty and add-on table",
      "Capital add-on decomposition by uncertainty scenario",
      "All analyses in one report"};
  for (std::size_t i = 0; i < std::size(kCommands); ++i) {
    CLI::App* sub = app.add_subcommand(kCommands[i], kDescriptions[i]);
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  cfg.grade = (grade_text == "sg" || grade_text == "speculative")
                  ? Grade::speculative
                  : Grade::all_ratings;
  cfg.n_obligors = parse_obligors(obligors_text);
  cfg.rho_mode = rho_mode_text == "mean" ? RhoMode::of_mean_pd
                                         : RhoMode::of_realized_pd;
  cfg.k_hat_method =
      khat_text == "taylor3" ? KHatMethod::taylor3 : KHatMethod::quadrature;

  ExplicitMoments moments;
  if (opt_pd->count() > 0) moments.pd_hat = pd_v;
  if (opt_lgd->count() > 0) moments.lgd_hat = lgd_v;
  if (opt_sk->count() > 0) moments.sigma_k = sk_v;
  if (opt_sl->count() > 0) moments.sigma_lgd = sl_v;
  if (opt_rho->count() > 0) moments.rho_lgd_k = rho_v;

  const std::vector<std::string> config_warnings = validate(cfg);

  std::unique_ptr<RatePanel> panel;
  std::string digest_input;
  if (!cfg.input_path.empty()) {
    digest_input = read_file_bytes(cfg.input_path);
    panel = std::make_unique<RatePanel>(load_panel(cfg.input_path));
  }
  if (moments.any()) {
    if (!digest_input.empty()) digest_input += '|';
    digest_input += moments_fingerprint(moments);
  }
  const std::string digest = fnv1a_hex(digest_input);

  const std::string command = app.get_subcommands().front()->get_name();
  auto need_panel = [&]() -> const RatePanel& {
    if (!panel) {
      throw validation_error(command + " requires --input <csv>");
    }
    return *panel;
  };

  if (command == "qq") {
    write_output(qq_csv(need_panel(), cfg.grade), cfg.out_path);
    return 0;
  }

  Report report;
  report.meta.emplace_back("command", command);
  if (command == "describe") {
    Report r = cmd_describe(need_panel(), cfg.grade);
    report.tables = std::move(r.tables);
    report.notes = std::move(r.notes);
  } else if (command == "normality") {
    Report r = cmd_normality(need_panel(), cfg.grade);
    report.tables = std::move(r.tables);
    report.notes = std::move(r.notes);
  } else if (command == "correlate") {
    Report r = cmd_correlate(need_panel(), cfg.grade);
    report.tables = std::move(r.tables);
    report.notes = std::move(r.notes);
  } else {
    const EstimatedInputs inputs =
        estimate_inputs(panel.get(), cfg.grade, moments, cfg.k_hat_method);
    Report r;
    if (command == "naive") {
      r = cmd_naive(inputs, cfg);
    } else if (command == "capital") {
      r = cmd_capital(inputs, cfg);
    } else if (command == "addon") {
      r = cmd_addon(inputs, cfg);
    } else {  // report
      r = cmd_report(need_panel(), inputs, cfg);
    }
    report.tables = std::move(r.tables);
    report.notes = std::move(r.notes);
  }

  attach_metadata(report, cfg, digest, utc_timestamp());
  for (const std::string& w : config_warnings) report.notes.push_back(w);
  write_output(render(report, cfg.format), cfg.out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const irbmr::validation_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const irbmr::io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
