#pragma once

#include <cstddef>
#include <vector>

#include "irbmr/rng.hpp"

namespace irbmr {

// Gaussian description of the estimation uncertainty around the yearly
// default threshold k = Phi^{-1}(PD) and the loss given default.
struct UncertaintyModel {
  double k_hat = 0.0;     // mean of k
  double sigma_k = 0.0;   // standard deviation of k
  double lgd_hat = 0.0;   // mean LGD
  double sigma_lgd = 0.0; // standard deviation of LGD
  double rho_lgd_k = 0.0; // correlation between LGD and k
};

// Throws std::domain_error when the model is outside its admissible region.
void validate(const UncertaintyModel& m);

enum class KHatMethod { taylor3, quadrature };

// Unconditional default probability implied by k ~ N(k_hat, sigma_k^2),
// E[Phi(k)] = Phi(k_hat / sqrt(1 + sigma_k^2)).
double expected_pd(double k_hat, double sigma_k);

// Inverts the mean default rate for k_hat at a given sigma_k, so that the
// threshold distribution reproduces the observed long-run default frequency.
// quadrature solves E[Phi(k)] = pd_hat with Gauss-Hermite integration;
// taylor3 solves the third-order expansion of the same condition,
// Phi(k) - (sigma_k^2 / 2) k phi(k) = pd_hat. Throws std::domain_error on
// invalid inputs and std::runtime_error when no bracketing root exists.
double infer_k_hat(double pd_hat, double sigma_k,
                   KHatMethod method = KHatMethod::quadrature);

struct ParameterDraw {
  double k = 0.0;
  double lgd = 0.0;
};

// Samples correlated (k, lgd) pairs by a Cholesky factor of the 2x2
// covariance. Draw order per sample is fixed: the k innovation first, then
// the lgd innovation. With clamp_lgd set, the lgd innovation is redrawn
// while the result falls outside [0, 1] (at most 256 attempts, after which
// the value is clamped to the nearest bound).
class ParameterSampler {
 public:
  explicit ParameterSampler(const UncertaintyModel& m, bool clamp_lgd = false);

  ParameterDraw operator()(NormalStream& stream) const;

 private:
  double k_hat_;
  double sigma_k_;
  double lgd_hat_;
  double chol_a_;  // loading of the lgd draw on the k innovation
  double chol_b_;  // residual lgd volatility
  bool clamp_lgd_;
};

std::vector<ParameterDraw> sample_parameters(const UncertaintyModel& m,
                                             NormalStream& stream,
                                             std::size_t count,
                                             bool clamp_lgd = false);

}  // namespace irbmr
