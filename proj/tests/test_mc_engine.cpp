#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "irbmr/asrf.hpp"
#include "irbmr/mc_engine.hpp"
#include "irbmr/normal.hpp"
#include "irbmr/param_uncertainty.hpp"
#include "toy_model.hpp"

using namespace irbmr;

namespace {

std::vector<double> iota_sample(std::int64_t n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i + 1.0;
  return v;
}

UncertaintyModel reference_model() {
  // All-ratings pool moments.
  return UncertaintyModel{-2.206387, 0.237, 0.5526, 0.1025, 0.717};
}

}  // namespace

TEST_CASE("var_quantile follows the ceil(alpha n) order-statistic rule") {
  const std::vector<double> v = iota_sample(1000);
  CHECK(var_quantile(v, 0.5) == 500.0);
  CHECK(var_quantile(v, 0.999) == 999.0);
  CHECK(var_quantile(v, 0.9995) == 1000.0);
  CHECK(var_quantile(v, 0.001) == 1.0);
  CHECK(var_quantile(v, 0.25) == 250.0);

  // ceil must act on the exact real product, not its binary rounding:
  // 0.999 * 10^6 is mathematically integral.
  const std::vector<double> big = iota_sample(1'000'000);
  CHECK(var_quantile(big, 0.999) == 999000.0);

  CHECK_THROWS_AS(var_quantile({}, 0.5), std::domain_error);
  CHECK_THROWS_AS(var_quantile(v, 0.0), std::domain_error);
  CHECK_THROWS_AS(var_quantile(v, 1.0), std::domain_error);
}

TEST_CASE("var_quantile agrees with an independent normal sampler") {
  std::mt19937_64 eng(12345);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> sample(1'000'000);
  for (double& x : sample) x = normal(eng);
  std::sort(sample.begin(), sample.end());
  CHECK(std::fabs(var_quantile(sample, 0.999) - 3.0902323061678135) <= 0.03);
}

TEST_CASE("degenerate model reduces to the closed-form capital") {
  UncertaintyModel m{norm_quantile(0.0159), 0.0, 0.5526, 0.0, 0.0};
  SimulationConfig cfg;
  cfg.n_sim = 1'000'000;
  cfg.seed = 7;
  const LossSummary s = simulate_losses(m, cfg);
  const CapitalResult closed = naive_capital({0.0159, 0.5526});
  CHECK(std::fabs(s.var_alpha - closed.value_at_risk) <=
        3.0 * s.var_se + 1e-12);
  CHECK(std::fabs(s.mean - closed.expected_loss) <= 3.0 * s.mean_se);
  const CapitalResult mc = correct_capital(s);
  CHECK(mc.rc == s.var_alpha - s.mean);
  CHECK(mc.alpha == cfg.alpha);
}

TEST_CASE("toy lattice: enumeration matches the frozen reference") {
  const toy::Model model = toy::build();
  CHECK(std::fabs(toy::quantile(model, 0.999) - 0.152418) <= 2e-6);
  CHECK(std::fabs(model.mean - 0.022389) <= 2e-6);
}

TEST_CASE("toy lattice: monte carlo agrees with exhaustive enumeration") {
  const toy::Model model = toy::build();
  const toy::McResult mc = toy::simulate(model, 200'000, 0.999, 9);
  const double resolution = toy::grid_resolution(model, 0.999);
  CHECK(std::fabs(mc.quantile - toy::quantile(model, 0.999)) <=
        resolution + 3.0 * mc.quantile_se);
  CHECK(std::fabs(mc.mean - model.mean) <= 3.0 * mc.mean_se);
}

TEST_CASE("results are bit-identical across thread counts") {
  const UncertaintyModel m = reference_model();
  SimulationConfig cfg;
  cfg.n_sim = 300'000;  // spans several blocks
  cfg.seed = 11;

  const LossSummary a = simulate_losses(m, cfg, 1);
  const LossSummary b = simulate_losses(m, cfg, 4);
  CHECK(a.var_alpha == b.var_alpha);
  CHECK(a.mean == b.mean);
  CHECK(a.min == b.min);
  CHECK(a.max == b.max);
  CHECK(a.mean_se == b.mean_se);
  CHECK(a.var_se == b.var_se);
  REQUIRE(a.losses.size() == b.losses.size());
  CHECK(a.losses == b.losses);
}

TEST_CASE("streamed selection reproduces the buffered result exactly") {
  const UncertaintyModel m = reference_model();
  SimulationConfig cfg;
  cfg.n_sim = 300'000;
  cfg.seed = 13;

  LossSummary buffered = simulate_losses(m, cfg, 2);
  REQUIRE_FALSE(buffered.streamed);

  cfg.max_buffer_bytes = 1u << 20;  // force multi-pass selection
  LossSummary streamed = simulate_losses(m, cfg, 2);
  REQUIRE(streamed.streamed);
  CHECK(streamed.losses.empty());

  CHECK(streamed.var_alpha == buffered.var_alpha);
  CHECK(streamed.mean == buffered.mean);
  CHECK(streamed.min == buffered.min);
  CHECK(streamed.max == buffered.max);
  CHECK(streamed.mean_se == buffered.mean_se);
  CHECK(streamed.var_se == buffered.var_se);

  // And independent of thread count in streaming mode too.
  LossSummary streamed3 = simulate_losses(m, cfg, 3);
  CHECK(streamed3.var_alpha == streamed.var_alpha);
  CHECK(streamed3.mean == streamed.mean);
}

TEST_CASE("loss quantiles increase with the confidence level") {
  const UncertaintyModel m = reference_model();
  SimulationConfig cfg;
  cfg.n_sim = 200'000;
  cfg.seed = 3;
  const LossSummary s = simulate_losses(m, cfg);
  CHECK(var_quantile(s.losses, 0.99) < var_quantile(s.losses, 0.999));
  CHECK(var_quantile(s.losses, 0.9) < var_quantile(s.losses, 0.99));
}

TEST_CASE("uncorrelated uncertainty leaves the mean loss at lgd * pd") {
  UncertaintyModel m = reference_model();
  m.rho_lgd_k = 0.0;
  SimulationConfig cfg;
  cfg.n_sim = 500'000;
  cfg.seed = 17;
  const double el = m.lgd_hat * expected_pd(m.k_hat, m.sigma_k);
  for (RhoMode mode : {RhoMode::of_realized_pd, RhoMode::of_mean_pd}) {
    cfg.rho_mode = mode;
    const LossSummary s = simulate_losses(m, cfg);
    CHECK(std::fabs(s.mean - el) <= 3.0 * s.mean_se);
  }
}

TEST_CASE("scenario restrictions and ordering of add-ons") {
  const UncertaintyModel full = reference_model();
  const PointEstimates pe{0.0159, 0.5526};

  const UncertaintyModel plain = scenario_model(full, pe, Scenario::plain);
  CHECK(plain.k_hat == norm_quantile(pe.pd_hat));
  CHECK(plain.sigma_k == 0.0);
  CHECK(plain.sigma_lgd == 0.0);
  CHECK(plain.rho_lgd_k == 0.0);

  const UncertaintyModel lgd_only =
      scenario_model(full, pe, Scenario::lgd_only);
  CHECK(lgd_only.k_hat == norm_quantile(pe.pd_hat));
  CHECK(lgd_only.sigma_k == 0.0);
  CHECK(lgd_only.sigma_lgd == full.sigma_lgd);
  CHECK(lgd_only.rho_lgd_k == 0.0);

  const UncertaintyModel k_only = scenario_model(full, pe, Scenario::k_only);
  CHECK(k_only.k_hat == full.k_hat);
  CHECK(k_only.sigma_k == full.sigma_k);
  CHECK(k_only.sigma_lgd == 0.0);

  const UncertaintyModel indep =
      scenario_model(full, pe, Scenario::independent);
  CHECK(indep.sigma_k == full.sigma_k);
  CHECK(indep.sigma_lgd == full.sigma_lgd);
  CHECK(indep.rho_lgd_k == 0.0);

  SimulationConfig cfg;
  cfg.n_sim = 200'000;
  cfg.seed = 19;
  const AddOnReport rep = scenario_addons(full, pe, cfg);
  REQUIRE(rep.scenarios.size() == 4);
  CHECK(rep.scenarios[0].name == "lgd_only");
  CHECK(rep.scenarios[3].name == "correlated");
  // More uncertainty structure, more required capital.
  CHECK(rep.scenarios[3].add_on > rep.scenarios[2].add_on);
  CHECK(rep.scenarios[2].add_on > rep.scenarios[0].add_on);
  CHECK(rep.scenarios[1].add_on > rep.scenarios[0].add_on);
  CHECK(rep.excess_el ==
        rep.scenarios[3].capital.expected_loss - rep.naive.expected_loss);
  for (const ScenarioResult& sr : rep.scenarios) {
    CHECK(sr.capital.rc ==
          sr.capital.value_at_risk - sr.capital.expected_loss);
  }
}

TEST_CASE("add-on formula and its guard") {
  const CapitalResult naive{0.095, 0.009, 0.086, 0.999};
  const CapitalResult correct{0.120, 0.010, 0.110, 0.999};
  const double expected = ((0.110 - 0.086) + (0.010 - 0.009)) / 0.086;
  CHECK(std::fabs(add_on(correct, naive) - expected) <= 1e-15);
  const CapitalResult degenerate{0.0, 0.0, 0.0, 0.999};
  CHECK_THROWS_AS(add_on(correct, degenerate), std::domain_error);
}

TEST_CASE("single-obligor portfolio is a bernoulli loss") {
  UncertaintyModel m{norm_quantile(0.0159), 0.0, 1.0, 0.0, 0.0};
  SimulationConfig cfg;
  cfg.n_sim = 200'000;
  cfg.seed = 23;
  cfg.n_obligors = 1;
  const LossSummary s = simulate_losses(m, cfg);
  for (double x : {s.min, s.max}) CHECK((x == 0.0 || x == 1.0));
  CHECK(std::fabs(s.mean - 0.0159) <=
        3.0 * std::sqrt(0.0159 * (1.0 - 0.0159) / 200'000.0));
}

TEST_CASE("granularity raises capital for a small book") {
  UncertaintyModel m{norm_quantile(0.0159), 0.0, 0.5526, 0.0, 0.0};
  SimulationConfig cfg;
  cfg.n_sim = 200'000;
  cfg.seed = 29;
  const LossSummary asymptotic = simulate_losses(m, cfg);
  cfg.n_obligors = 50;
  const LossSummary finite = simulate_losses(m, cfg);
  CHECK(finite.var_alpha >=
        asymptotic.var_alpha - 3.0 * (finite.var_se + asymptotic.var_se));
  // Unbiased granularity: the mean loss is unchanged.
  CHECK(std::fabs(finite.mean - asymptotic.mean) <=
        3.0 * (finite.mean_se + asymptotic.mean_se));
}

TEST_CASE("a very granular book approaches the asymptotic loss") {
  // Large obligor counts push the binomial sampler onto its incomplete-beta
  // bisection branch; the distribution must collapse to the asymptotic one.
  UncertaintyModel m{norm_quantile(0.0159), 0.0, 0.5526, 0.0, 0.0};
  SimulationConfig cfg;
  cfg.n_sim = 100'000;
  cfg.seed = 31;
  const LossSummary asymptotic = simulate_losses(m, cfg);
  cfg.n_obligors = 400'000;
  const LossSummary finite = simulate_losses(m, cfg);
  CHECK(std::fabs(finite.mean - asymptotic.mean) <=
        3.0 * (finite.mean_se + asymptotic.mean_se));
  CHECK(std::fabs(finite.var_alpha - asymptotic.var_alpha) <=
        3.0 * (finite.var_se + asymptotic.var_se) + 0.003);
}

TEST_CASE("configuration validation and histogram") {
  const UncertaintyModel m = reference_model();
  SimulationConfig cfg;
  cfg.n_sim = 500;
  CHECK_THROWS_AS(simulate_losses(m, cfg), std::domain_error);
  cfg.n_sim = 10'000;
  cfg.alpha = 1.0;
  CHECK_THROWS_AS(simulate_losses(m, cfg), std::domain_error);
  cfg.alpha = 0.999;
  cfg.max_buffer_bytes = 1024;
  CHECK_THROWS_AS(simulate_losses(m, cfg), std::domain_error);

  cfg.max_buffer_bytes = std::size_t{128} << 20;
  const LossSummary s = simulate_losses(m, cfg);
  const LossHistogram h = loss_histogram(s, 64);
  std::int64_t total = 0;
  for (std::int64_t c : h.counts) total += c;
  CHECK(total == s.n);
  CHECK(h.lo == s.min);
  CHECK(h.hi == s.max);

  cfg.n_sim = 200'000;
  cfg.max_buffer_bytes = 1u << 20;
  const LossSummary streamed = simulate_losses(m, cfg);
  CHECK_THROWS_AS(loss_histogram(streamed, 64), std::domain_error);
}
