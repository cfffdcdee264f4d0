#include "irbmr/pipeline.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "irbmr/errors.hpp"
#include "irbmr/normal.hpp"

namespace irbmr {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string alpha_label(double alpha) { return fmt("%g", alpha); }

SimulationConfig to_sim_config(const RunConfig& cfg, double alpha) {
  SimulationConfig sim;
  sim.n_sim = cfg.n_sim;
  sim.seed = cfg.seed;
  sim.alpha = alpha;
  sim.n_obligors = cfg.n_obligors;
  sim.clamp_lgd = cfg.clamp_lgd;
  sim.rho_mode = cfg.rho_mode;
  return sim;
}

Table moments_table(const EstimatedInputs& in, Grade grade) {
  Table t;
  t.title = std::string("model moments (") + grade_name(grade) + ")";
  t.columns = {"value"};
  t.rows.push_back({"mean annual default rate", {Cell::pct(in.point.pd_hat)}});
  t.rows.push_back({"mean annual loss rate", {Cell::pct(in.point.lgd_hat)}});
  t.rows.push_back({"default threshold location k", {Cell::num(in.model.k_hat)}});
  t.rows.push_back({"std dev of k", {Cell::num(in.model.sigma_k)}});
  t.rows.push_back({"std dev of loss rate", {Cell::num(in.model.sigma_lgd)}});
  t.rows.push_back({"corr(loss rate, k)", {Cell::num(in.model.rho_lgd_k)}});
  return t;
}

Table naive_table(const CapitalResult& naive) {
  Table t;
  t.title = "naive regulatory capital (alpha=" + alpha_label(naive.alpha) + ")";
  t.columns = {"value"};
  t.rows.push_back({"value at risk", {Cell::pct(naive.value_at_risk)}});
  t.rows.push_back({"expected loss", {Cell::pct(naive.expected_loss)}});
  t.rows.push_back({"regulatory capital", {Cell::pct(naive.rc)}});
  return t;
}

void append_addon_tables(Report& report, const AddOnReport& rep, double alpha,
                         bool include_capital_table) {
  if (include_capital_table) {
    const ScenarioResult& full = rep.scenarios.back();
    Table t;
    t.title = "capital with parameter uncertainty (alpha=" +
              alpha_label(alpha) + ")";
    t.columns = {"value"};
    t.rows.push_back({"value at risk", {Cell::pct(full.capital.value_at_risk)}});
    t.rows.push_back({"expected loss", {Cell::pct(full.capital.expected_loss)}});
    t.rows.push_back({"regulatory capital", {Cell::pct(full.capital.rc)}});
    t.rows.push_back({"mc se of mean loss", {Cell::num(full.mean_se)}});
    t.rows.push_back({"mc se of value at risk", {Cell::num(full.var_se)}});
    report.tables.push_back(std::move(t));
  }

  Table t;
  t.title = "capital add-on by uncertainty scenario (alpha=" +
            alpha_label(alpha) + ")";
  t.columns = {"add-on", "value at risk", "expected loss",
               "regulatory capital"};
  t.rows.push_back({"naive",
                    {Cell::str("-"), Cell::pct(rep.naive.value_at_risk),
                     Cell::pct(rep.naive.expected_loss),
                     Cell::pct(rep.naive.rc)}});
  for (const ScenarioResult& sr : rep.scenarios) {
    t.rows.push_back({sr.name,
                      {Cell::pct(sr.add_on),
                       Cell::pct(sr.capital.value_at_risk),
                       Cell::pct(sr.capital.expected_loss),
                       Cell::pct(sr.capital.rc)}});
  }
  report.tables.push_back(std::move(t));

  Table el;
  el.title = "expected loss correction (alpha=" + alpha_label(alpha) + ")";
  el.columns = {"value"};
  el.rows.push_back({"excess expected loss vs naive", {Cell::pct(rep.excess_el)}});
  report.tables.push_back(std::move(el));
}

// Runs the scenario decomposition at cfg.alpha and, when that is not the
// reference 0.999 level, once more at 0.999 so the two sit side by side.
void append_capital_sections(Report& report, const EstimatedInputs& in,
                             const RunConfig& cfg, bool include_capital_table) {
  const AddOnReport main_rep =
      scenario_addons(in.model, in.point, to_sim_config(cfg, cfg.alpha),
                      cfg.threads);
  append_addon_tables(report, main_rep, cfg.alpha, include_capital_table);
  if (cfg.alpha != 0.999) {
    const AddOnReport ref_rep =
        scenario_addons(in.model, in.point, to_sim_config(cfg, 0.999),
                        cfg.threads);
    append_addon_tables(report, ref_rep, 0.999, include_capital_table);
    report.notes.push_back(
        "requested alpha=" + alpha_label(cfg.alpha) +
        "; the 0.999 reference level is reported alongside for comparison");
  }
}

std::vector<double> probit_or_validation(const std::vector<double>& rates,
                                         const char* what) {
  try {
    return probit_transform(rates);
  } catch (const std::domain_error& e) {
    throw validation_error(std::string(what) + ": " + e.what());
  }
}

}  // namespace

bool ExplicitMoments::any() const {
  return pd_hat || lgd_hat || sigma_k || sigma_lgd || rho_lgd_k;
}

bool ExplicitMoments::complete() const {
  return pd_hat.has_value() && lgd_hat.has_value();
}

EstimatedInputs estimate_inputs(const RatePanel* panel, Grade grade,
                                const ExplicitMoments& overrides,
                                KHatMethod method) {
  EstimatedInputs out;
  double pd_hat = 0.0;
  double lgd_hat = 0.0;
  double sigma_k = 0.0;
  double sigma_lgd = 0.0;
  double rho = 0.0;

  if (panel != nullptr) {
    const SampleSeries lgd = lgd_series(*panel);
    const SampleSeries pd = pd_series(*panel, grade);
    if (lgd.values.size() < 4) {
      throw validation_error(
          "panel has " + std::to_string(lgd.values.size()) +
          " usable years; at least 4 are needed to estimate the moments");
    }
    out.from_panel = true;
    out.years = lgd.years;
    out.lgd = lgd.values;
    out.pd = pd.values;
    out.k = probit_or_validation(pd.values, "default rates");

    const DescribeResult dl = describe(out.lgd);
    const DescribeResult dp = describe(out.pd);
    const DescribeResult dk = describe(out.k);
    lgd_hat = dl.mean;
    sigma_lgd = dl.std_dev;
    pd_hat = dp.mean;
    sigma_k = dk.std_dev;
    rho = pearson(out.lgd, out.k).r;
  } else if (!overrides.complete()) {
    throw validation_error(
        "no input panel given: --pd and --lgd are required to specify the "
        "model moments directly");
  }

  if (overrides.pd_hat) pd_hat = *overrides.pd_hat;
  if (overrides.lgd_hat) lgd_hat = *overrides.lgd_hat;
  if (overrides.sigma_k) sigma_k = *overrides.sigma_k;
  if (overrides.sigma_lgd) sigma_lgd = *overrides.sigma_lgd;
  if (overrides.rho_lgd_k) rho = *overrides.rho_lgd_k;

  if (!(pd_hat > 0.0 && pd_hat < 1.0)) {
    throw validation_error("mean default rate must lie strictly in (0, 1)");
  }
  if (!(lgd_hat >= 0.0 && lgd_hat <= 1.0)) {
    throw validation_error("mean loss rate must lie in [0, 1]");
  }
  if (!(sigma_k >= 0.0)) {
    throw validation_error("std dev of k must be non-negative");
  }
  if (!(sigma_lgd >= 0.0)) {
    throw validation_error("std dev of the loss rate must be non-negative");
  }
  if (!(rho >= -1.0 && rho <= 1.0)) {
    throw validation_error("corr(loss rate, k) must lie in [-1, 1]");
  }

  out.point = PointEstimates{pd_hat, lgd_hat};
  out.model.k_hat = infer_k_hat(pd_hat, sigma_k, method);
  out.model.sigma_k = sigma_k;
  out.model.lgd_hat = lgd_hat;
  out.model.sigma_lgd = sigma_lgd;
  out.model.rho_lgd_k = rho;
  validate(out.model);
  return out;
}

Report cmd_describe(const RatePanel& panel, Grade grade) {
  Report report;
  const SampleSeries lgd = lgd_series(panel);
  const SampleSeries pd = pd_series(panel, grade);
  const std::vector<double> k = probit_or_validation(pd.values, "default rates");

  Table t;
  t.title = std::string("descriptive statistics (") + grade_name(grade) + ")";
  t.columns = {"n", "mean", "std dev", "min", "median", "max"};
  auto row = [&t](const std::string& label, const DescribeResult& d,
                  bool percent) {
    auto cell = [percent](double v) {
      return percent ? Cell::pct(v) : Cell::num(v);
    };
    t.rows.push_back({label,
                      {Cell::count(d.n), cell(d.mean), cell(d.std_dev),
                       cell(d.min), cell(d.median), cell(d.max)}});
  };
  row("annual loss rate", describe(lgd.values), true);
  row("annual default rate", describe(pd.values), true);
  row("probit default rate k", describe(k), false);
  report.tables.push_back(std::move(t));
  for (const std::string& w : panel.warnings) report.notes.push_back(w);
  return report;
}

Report cmd_normality(const RatePanel& panel, Grade grade) {
  Report report;
  const std::vector<double> lgd = lgd_series(panel).values;
  const std::vector<double> pd = pd_series(panel, grade).values;
  const std::vector<double> k = probit_or_validation(pd, "default rates");

  const ShapiroWilkResult sl = shapiro_wilk(lgd);
  const ShapiroWilkResult sk = shapiro_wilk(k);
  const BivariateNormalityResult biv = royston_bivariate(lgd, k);

  Table t;
  t.title = std::string("marginal normality, Shapiro-Wilk (") +
            grade_name(grade) + ")";
  t.columns = {"n", "W", "p-value"};
  t.rows.push_back({"annual loss rate",
                    {Cell::count(sl.n), Cell::num(sl.w), Cell::num(sl.p)}});
  t.rows.push_back({"probit default rate k",
                    {Cell::count(sk.n), Cell::num(sk.w), Cell::num(sk.p)}});
  report.tables.push_back(std::move(t));

  Table b;
  b.title = std::string("joint normality, Royston H (") + grade_name(grade) +
            ")";
  b.columns = {"H", "equivalent dof", "p-value", "equivalent W"};
  b.rows.push_back({"(loss rate, k)",
                    {Cell::num(biv.h), Cell::num(biv.edf), Cell::num(biv.p),
                     Cell::num(biv.w_equivalent)}});
  report.tables.push_back(std::move(b));
  return report;
}

Report cmd_correlate(const RatePanel& panel, Grade grade) {
  Report report;
  const std::vector<double> lgd = lgd_series(panel).values;
  const std::vector<double> pd = pd_series(panel, grade).values;
  const std::vector<double> k = probit_or_validation(pd, "default rates");

  const PearsonResult pr = pearson(lgd, k);
  const LinearFitResult fit = linear_fit(k, lgd);

  Table t;
  t.title = std::string("dependence: loss rate vs probit default rate (") +
            grade_name(grade) + ")";
  t.columns = {"value"};
  t.rows.push_back({"pearson r", {Cell::num(pr.r)}});
  t.rows.push_back({"95% ci lower", {Cell::num(pr.ci_lo)}});
  t.rows.push_back({"95% ci upper", {Cell::num(pr.ci_hi)}});
  t.rows.push_back({"t statistic", {Cell::num(pr.t)}});
  t.rows.push_back({"two-sided p-value", {Cell::num(pr.p)}});
  t.rows.push_back({"n", {Cell::count(pr.n)}});
  report.tables.push_back(std::move(t));

  Table f;
  f.title = std::string("least squares: loss rate on probit default rate (") +
            grade_name(grade) + ")";
  f.columns = {"value"};
  f.rows.push_back({"slope", {Cell::num(fit.slope)}});
  f.rows.push_back({"intercept", {Cell::num(fit.intercept)}});
  f.rows.push_back({"r squared", {Cell::num(fit.r2)}});
  f.rows.push_back({"adjusted r squared", {Cell::num(fit.adj_r2)}});
  f.rows.push_back({"slope p-value", {Cell::num(fit.slope_p)}});
  report.tables.push_back(std::move(f));
  return report;
}

std::string qq_csv(const RatePanel& panel, Grade grade) {
  const std::vector<double> lgd = lgd_series(panel).values;
  const std::vector<double> pd = pd_series(panel, grade).values;
  const std::vector<double> k = probit_or_validation(pd, "default rates");

  std::ostringstream out;
  out << "variable,theoretical,sample\n";
  auto emit = [&out](const char* name, const std::vector<QQPoint>& pts) {
    for (const QQPoint& p : pts) {
      out << name << ',' << fmt("%.17g", p.theoretical) << ','
          << fmt("%.17g", p.sample) << '\n';
    }
  };
  emit("lgd", qq_points(lgd));
  emit("k", qq_points(k));
  return out.str();
}

Report cmd_naive(const EstimatedInputs& inputs, const RunConfig& cfg) {
  Report report;
  report.tables.push_back(moments_table(inputs, cfg.grade));
  report.tables.push_back(naive_table(naive_capital(inputs.point, cfg.alpha)));
  if (cfg.alpha != 0.999) {
    report.tables.push_back(naive_table(naive_capital(inputs.point, 0.999)));
  }
  return report;
}

Report cmd_capital(const EstimatedInputs& inputs, const RunConfig& cfg) {
  Report report;
  report.tables.push_back(moments_table(inputs, cfg.grade));
  report.tables.push_back(naive_table(naive_capital(inputs.point, cfg.alpha)));
  append_capital_sections(report, inputs, cfg, true);
  return report;
}

Report cmd_addon(const EstimatedInputs& inputs, const RunConfig& cfg) {
  Report report;
  append_capital_sections(report, inputs, cfg, false);
  return report;
}

Report cmd_report(const RatePanel& panel, const EstimatedInputs& inputs,
                  const RunConfig& cfg) {
  Report report;
  auto absorb = [&report](Report&& part) {
    for (Table& t : part.tables) report.tables.push_back(std::move(t));
    for (std::string& n : part.notes) report.notes.push_back(std::move(n));
  };
  absorb(cmd_describe(panel, cfg.grade));
  absorb(cmd_normality(panel, cfg.grade));
  absorb(cmd_correlate(panel, cfg.grade));
  absorb(cmd_capital(inputs, cfg));
  return report;
}

void attach_metadata(Report& report, const RunConfig& cfg,
                     const std::string& input_digest,
                     const std::string& timestamp) {
  std::vector<std::pair<std::string, std::string>> meta;
  meta.emplace_back("grade", grade_name(cfg.grade));
  meta.emplace_back("alpha", alpha_label(cfg.alpha));
  meta.emplace_back("n_sim", std::to_string(cfg.n_sim));
  meta.emplace_back("seed", std::to_string(cfg.seed));
  meta.emplace_back("obligors", cfg.n_obligors == 0
                                    ? std::string("asymptotic")
                                    : std::to_string(cfg.n_obligors));
  meta.emplace_back("rho_mode", cfg.rho_mode == RhoMode::of_realized_pd
                                    ? "realized"
                                    : "mean");
  meta.emplace_back("clamp_lgd", cfg.clamp_lgd ? "true" : "false");
  meta.emplace_back("k_hat_method", cfg.k_hat_method == KHatMethod::quadrature
                                        ? "quadrature"
                                        : "taylor3");
  // Thread count is deliberately absent: results are bit-identical across
  // thread counts and the report must be too.
  meta.emplace_back("input",
                    cfg.input_path.empty() ? "(moments)" : cfg.input_path);
  meta.emplace_back("input_digest", input_digest);
  meta.emplace_back("timestamp", timestamp);
  // Appended after any command identification the caller already set.
  report.meta.insert(report.meta.end(), meta.begin(), meta.end());
}

}  // namespace irbmr
