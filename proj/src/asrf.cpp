#include "irbmr/asrf.hpp"

#include <cmath>
#include <stdexcept>

#include "irbmr/normal.hpp"

namespace irbmr {

double basel_correlation(double pd) {
  if (!(pd >= 0.0 && pd <= 1.0)) {
    throw std::domain_error("basel_correlation: pd must lie in [0, 1]");
  }
  const double decay = -std::expm1(-50.0);  // 1 - exp(-50)
  const double w = -std::expm1(-50.0 * pd) / decay;
  return 0.12 * w + 0.24 * (1.0 - w);
}

double conditional_default_probability(double m, double k, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::domain_error(
        "conditional_default_probability: rho must lie in (0, 1)");
  }
  return norm_cdf((k - std::sqrt(rho) * m) / std::sqrt(1.0 - rho));
}

double conditional_expected_loss(double m, double k, double lgd, double rho) {
  if (!(lgd >= 0.0 && lgd <= 1.0)) {
    throw std::domain_error(
        "conditional_expected_loss: lgd must lie in [0, 1]");
  }
  return lgd * conditional_default_probability(m, k, rho);
}

CapitalResult naive_capital(const PointEstimates& pe, double alpha) {
  if (!(pe.pd_hat > 0.0 && pe.pd_hat < 1.0)) {
    throw std::domain_error("naive_capital: pd_hat must lie in (0, 1)");
  }
  if (!(pe.lgd_hat >= 0.0 && pe.lgd_hat <= 1.0)) {
    throw std::domain_error("naive_capital: lgd_hat must lie in [0, 1]");
  }
  if (!(alpha > 0.5 && alpha < 1.0)) {
    throw std::domain_error("naive_capital: alpha must lie in (0.5, 1)");
  }

  const double rho = basel_correlation(pe.pd_hat);
  const double k = norm_quantile(pe.pd_hat);
  // Loss is decreasing in M, so the loss alpha-quantile sits at the
  // (1 - alpha)-quantile of the factor.
  const double m_adverse = norm_quantile(1.0 - alpha);
  CapitalResult out;
  out.alpha = alpha;
  out.value_at_risk = conditional_expected_loss(m_adverse, k, pe.lgd_hat, rho);
  out.expected_loss = pe.lgd_hat * pe.pd_hat;
  out.rc = out.value_at_risk - out.expected_loss;
  return out;
}

}  // namespace irbmr
