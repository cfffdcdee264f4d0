#pragma once

#include <optional>
#include <string>
#include <vector>

#include "irbmr/asrf.hpp"
#include "irbmr/data_io.hpp"
#include "irbmr/mc_engine.hpp"
#include "irbmr/param_uncertainty.hpp"
#include "irbmr/report.hpp"
#include "irbmr/stats.hpp"

namespace irbmr {

// Command-line overrides for the model moments. When pd_hat and lgd_hat are
// both given the input panel becomes optional for the capital commands.
struct ExplicitMoments {
  std::optional<double> pd_hat;
  std::optional<double> lgd_hat;
  std::optional<double> sigma_k;
  std::optional<double> sigma_lgd;
  std::optional<double> rho_lgd_k;

  bool any() const;
  bool complete() const;  // pd_hat and lgd_hat both present
};

// Everything the capital commands need, derived from an annual panel of
// default and loss rates, from explicit moments, or from a mix of the two.
struct EstimatedInputs {
  PointEstimates point{};    // sample means of the annual rates
  UncertaintyModel model{};  // Gaussian parameter-uncertainty description
  bool from_panel = false;

  // Populated only when a panel was supplied.
  std::vector<int> years;
  std::vector<double> lgd;
  std::vector<double> pd;
  std::vector<double> k;  // probit-transformed default rates
};

// Estimation recipe: lgd_hat and sigma_lgd are the sample mean and standard
// deviation of the annual loss rates; sigma_k is the standard deviation of
// the probit-transformed default rates; k_hat is backed out so that the
// expected default rate under Gaussian uncertainty reproduces the sample
// mean; rho_lgd_k is the Pearson correlation between annual loss rates and
// probit default rates. Overrides replace the estimated moments before
// k_hat inference.
EstimatedInputs estimate_inputs(const RatePanel* panel, Grade grade,
                                const ExplicitMoments& overrides,
                                KHatMethod method);

Report cmd_describe(const RatePanel& panel, Grade grade);
Report cmd_normality(const RatePanel& panel, Grade grade);
Report cmd_correlate(const RatePanel& panel, Grade grade);

// Plot-ready normal quantile-quantile data for the loss-rate series and the
// probit default-rate series, as CSV text with a variable column.
std::string qq_csv(const RatePanel& panel, Grade grade);

Report cmd_naive(const EstimatedInputs& inputs, const RunConfig& cfg);

// Full uncertainty-aware capital: naive benchmark, simulated capital with
// all uncertainty sources, the four-scenario add-on decomposition, and the
// expected-loss correction. When cfg.alpha differs from 0.999 both
// confidence levels are reported side by side.
Report cmd_capital(const EstimatedInputs& inputs, const RunConfig& cfg);

// The add-on decomposition alone.
Report cmd_addon(const EstimatedInputs& inputs, const RunConfig& cfg);

// Runs describe, normality, correlate, and capital into a single report.
Report cmd_report(const RatePanel& panel, const EstimatedInputs& inputs,
                  const RunConfig& cfg);

// Prepends the standard run metadata (grade, alpha, n_sim, seed, input
// digest, timestamp) shared by every command.
void attach_metadata(Report& report, const RunConfig& cfg,
                     const std::string& input_digest,
                     const std::string& timestamp);

}  // namespace irbmr
