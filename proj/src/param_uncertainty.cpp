#include "irbmr/param_uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "irbmr/gauss_hermite.hpp"
#include "irbmr/normal.hpp"

namespace irbmr {

namespace {

constexpr int kQuadratureNodes = 128;

// Bisection on a bracketing interval. The objective functions used here are
// monotone increasing in k over the bracket, so plain bisection is enough
// and keeps the solve fully deterministic.
template <class F>
double solve_bracketed(F&& f, double lo, double hi, const char* what) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw std::runtime_error(std::string(what) +
                             ": root is not bracketed by the search interval");
  }
  for (int i = 0; i < 200 && hi - lo > 1.0e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (fhi > 0.0)) {
      hi = mid;
      fhi = fmid;
    } else {
      lo = mid;
      flo = fmid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void validate(const UncertaintyModel& m) {
  if (!std::isfinite(m.k_hat)) {
    throw std::domain_error("UncertaintyModel: k_hat must be finite");
  }
  if (!(m.sigma_k >= 0.0) || !std::isfinite(m.sigma_k)) {
    throw std::domain_error("UncertaintyModel: sigma_k must be nonnegative");
  }
  if (!(m.lgd_hat >= 0.0 && m.lgd_hat <= 1.0)) {
    throw std::domain_error("UncertaintyModel: lgd_hat must lie in [0, 1]");
  }
  if (!(m.sigma_lgd >= 0.0) || !std::isfinite(m.sigma_lgd)) {
    throw std::domain_error("UncertaintyModel: sigma_lgd must be nonnegative");
  }
  if (!(m.rho_lgd_k >= -1.0 && m.rho_lgd_k <= 1.0)) {
    throw std::domain_error("UncertaintyModel: rho_lgd_k must lie in [-1, 1]");
  }
}

double expected_pd(double k_hat, double sigma_k) {
  if (!(sigma_k >= 0.0)) {
    throw std::domain_error("expected_pd: sigma_k must be nonnegative");
  }
  return norm_cdf(k_hat / std::sqrt(1.0 + sigma_k * sigma_k));
}

double infer_k_hat(double pd_hat, double sigma_k, KHatMethod method) {
  if (!(pd_hat > 0.0 && pd_hat < 1.0)) {
    throw std::domain_error("infer_k_hat: pd_hat must lie in (0, 1)");
  }
  if (!(sigma_k >= 0.0)) {
    throw std::domain_error("infer_k_hat: sigma_k must be nonnegative");
  }

  const double center = norm_quantile(pd_hat);
  if (sigma_k == 0.0) return center;

  const double lo = center - 5.0 * sigma_k - 1.0;
  const double hi = center + 5.0 * sigma_k + 1.0;

  if (method == KHatMethod::quadrature) {
    auto objective = [pd_hat, sigma_k](double k_hat) {
      const double mean_pd = gaussian_expectation(
          [](double k) { return norm_cdf(k); }, k_hat, sigma_k,
          kQuadratureNodes);
      return mean_pd - pd_hat;
    };
    return solve_bracketed(objective, lo, hi, "infer_k_hat(quadrature)");
  }

  const double half_var = 0.5 * sigma_k * sigma_k;
  auto objective = [pd_hat, half_var](double k) {
    return norm_cdf(k) - half_var * k * norm_pdf(k) - pd_hat;
  };
  return solve_bracketed(objective, lo, hi, "infer_k_hat(taylor3)");
}

ParameterSampler::ParameterSampler(const UncertaintyModel& m, bool clamp_lgd)
    : k_hat_(m.k_hat),
      sigma_k_(m.sigma_k),
      lgd_hat_(m.lgd_hat),
      chol_a_(m.sigma_lgd * m.rho_lgd_k),
      chol_b_(m.sigma_lgd *
              std::sqrt(std::max(0.0, 1.0 - m.rho_lgd_k * m.rho_lgd_k))),
      clamp_lgd_(clamp_lgd) {
  validate(m);
}

ParameterDraw ParameterSampler::operator()(NormalStream& stream) const {
  const double z1 = stream.normal();
  const double z2 = stream.normal();
  ParameterDraw d;
  d.k = k_hat_ + sigma_k_ * z1;
  d.lgd = lgd_hat_ + chol_a_ * z1 + chol_b_ * z2;
  if (clamp_lgd_ && (d.lgd < 0.0 || d.lgd > 1.0)) {
    // Redraw only the residual innovation, keeping k and the conditional
    // law of lgd given k intact. chol_b_ == 0 leaves nothing to redraw.
    if (chol_b_ > 0.0) {
      for (int i = 0; i < 256 && (d.lgd < 0.0 || d.lgd > 1.0); ++i) {
        d.lgd = lgd_hat_ + chol_a_ * z1 + chol_b_ * stream.normal();
      }
    }
    d.lgd = std::clamp(d.lgd, 0.0, 1.0);
  }
  return d;
}

std::vector<ParameterDraw> sample_parameters(const UncertaintyModel& m,
                                             NormalStream& stream,
                                             std::size_t count,
                                             bool clamp_lgd) {
  const ParameterSampler sampler(m, clamp_lgd);
  std::vector<ParameterDraw> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sampler(stream));
  return out;
}

}  // namespace irbmr
