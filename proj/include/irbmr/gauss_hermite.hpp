#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace irbmr {

// Nodes and weights of the n-point Gauss-Hermite rule in the physicists'
// convention: integral of exp(-x^2) f(x) dx ~ sum w_i f(x_i). Abscissas are
// returned in ascending order and the weights sum to sqrt(pi).
struct GaussHermiteRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Returns a cached rule for the given node count. Thread safe. Throws
// std::domain_error for n < 1.
const GaussHermiteRule& gauss_hermite(int n);

// Expectation E[f(mu + sigma Z)] for Z standard normal, computed with an
// n-node Hermite rule through the change of variable z = mu + sqrt(2) sigma x.
template <class F>
double gaussian_expectation(F&& f, double mu, double sigma, int n = 128) {
  static const double kSqrtPi = std::sqrt(std::acos(-1.0));
  static const double kSqrt2 = std::sqrt(2.0);
  const GaussHermiteRule& rule = gauss_hermite(n);
  const double scale = kSqrt2 * sigma;
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    acc += rule.w[i] * f(mu + scale * rule.x[i]);
  }
  return acc / kSqrtPi;
}

}  // namespace irbmr
