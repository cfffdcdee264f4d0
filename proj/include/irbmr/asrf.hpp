#pragma once

namespace irbmr {

// Point (mean) estimates of the portfolio risk parameters.
struct PointEstimates {
  double pd_hat = 0.0;
  double lgd_hat = 0.0;
};

// Capital figures at confidence level alpha. rc is the unexpected-loss
// requirement value_at_risk - expected_loss.
struct CapitalResult {
  double value_at_risk = 0.0;
  double expected_loss = 0.0;
  double rc = 0.0;
  double alpha = 0.0;
};

// Regulatory asset correlation for corporate exposures as a function of PD:
// an exponentially weighted blend of 0.12 and 0.24 with decay rate 50.
// Defined on the closed interval [0, 1].
double basel_correlation(double pd);

// Conditional default probability in the one-factor Gaussian model given the
// systematic factor value m: Phi((k - sqrt(rho) m) / sqrt(1 - rho)).
double conditional_default_probability(double m, double k, double rho);

// Expected loss of the asymptotic portfolio conditional on M = m.
double conditional_expected_loss(double m, double k, double lgd, double rho);

// Capital requirement with parameters frozen at their point estimates: the
// conditional loss at the adverse alpha-quantile of the systematic factor,
// net of expected loss.
CapitalResult naive_capital(const PointEstimates& pe, double alpha = 0.999);

}  // namespace irbmr
