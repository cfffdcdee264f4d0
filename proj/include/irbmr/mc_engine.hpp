#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "irbmr/asrf.hpp"
#include "irbmr/param_uncertainty.hpp"

namespace irbmr {

// How the asset correlation is chosen on each simulated path: from the PD
// realized on that path (the threshold draw pushed back through Phi), or
// frozen at the correlation of the mean PD.
enum class RhoMode { of_realized_pd, of_mean_pd };

struct SimulationConfig {
  std::int64_t n_sim = 1'000'000;
  std::uint64_t seed = 1;
  double alpha = 0.999;
  int n_obligors = 0;  // 0 = asymptotic (infinitely granular) portfolio
  bool clamp_lgd = false;
  RhoMode rho_mode = RhoMode::of_realized_pd;
  // Above this budget the loss sample is not kept in memory; quantiles are
  // then found exactly by regenerating paths in multiple passes.
  std::size_t max_buffer_bytes = std::size_t{128} << 20;
};

struct LossSummary {
  std::int64_t n = 0;
  double alpha = 0.0;
  double mean = 0.0;
  double var_alpha = 0.0;  // order statistic ceil(alpha n), 1-based
  double min = 0.0;
  double max = 0.0;
  double mean_se = 0.0;
  double var_se = 0.0;  // order-statistic spacing estimate
  bool streamed = false;
  std::vector<double> losses;  // ascending; empty when streamed
};

// Alpha-quantile of an ascending sample as the ceil(alpha n)-th order
// statistic (1-based). Throws std::domain_error for an empty sample or
// alpha outside (0, 1).
double var_quantile(const std::vector<double>& sorted, double alpha);

// One Monte Carlo run of the loss distribution under parameter uncertainty.
// threads <= 0 uses the hardware concurrency. Results are bit-identical for
// a given (model, config, scenario_id) regardless of thread count.
LossSummary simulate_losses(const UncertaintyModel& m,
                            const SimulationConfig& cfg, int threads = 1,
                            std::uint32_t scenario_id = 0);

// Capital at the summary's confidence level: VaR, expected loss and their
// difference.
CapitalResult correct_capital(const LossSummary& s);

// Relative capital add-on of `correct` over `naive`:
// ((rc - rc_naive) + (el - el_naive)) / rc_naive.
// Throws std::domain_error when the naive requirement is not positive.
double add_on(const CapitalResult& correct, const CapitalResult& naive);

// Nested uncertainty scenarios, ordered by how much of the estimated
// uncertainty structure they switch on.
enum class Scenario : std::uint32_t {
  plain = 0,        // no parameter uncertainty (degenerate draws)
  lgd_only = 1,     // only lgd uncertain
  k_only = 2,       // only the default threshold uncertain
  independent = 3,  // both uncertain, independent
  correlated = 4,   // both uncertain with the estimated correlation
};

const char* scenario_name(Scenario s);

// Restriction of the full model to one scenario. Scenarios that suppress
// sigma_k re-infer the threshold location from the observed mean default
// rate, so every scenario reproduces pe.pd_hat exactly.
UncertaintyModel scenario_model(const UncertaintyModel& full,
                                const PointEstimates& pe, Scenario s);

struct ScenarioResult {
  Scenario scenario = Scenario::plain;
  std::string name;
  CapitalResult capital;
  double add_on = 0.0;
  double mean_se = 0.0;
  double var_se = 0.0;
};

struct AddOnReport {
  CapitalResult naive;
  std::vector<ScenarioResult> scenarios;  // lgd_only .. correlated
  double excess_el = 0.0;  // EL(correlated) - EL(naive)
};

// Runs the four uncertainty scenarios against the naive benchmark.
AddOnReport scenario_addons(const UncertaintyModel& m,
                            const PointEstimates& pe,
                            const SimulationConfig& cfg, int threads = 1);

struct LossHistogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::int64_t> counts;
};

// Equal-width histogram of a buffered loss sample. Throws when the summary
// was streamed (losses not retained).
LossHistogram loss_histogram(const LossSummary& s, int bins);

}  // namespace irbmr
