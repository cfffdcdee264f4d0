#include "irbmr/gauss_hermite.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace irbmr {

namespace {

// Root finding for the Hermite polynomial H_n by Newton iteration on the
// orthonormal three-term recurrence. The classical starting guesses walk
// inward from the largest root; only the upper half is solved, the lower
// half follows by symmetry.
GaussHermiteRule build_rule(int n) {
  constexpr double kPim4 = 0.7511255444649424828587030;  // pi^(-1/4)
  constexpr double kTol = 1.0e-14;
  constexpr int kMaxNewton = 100;

  GaussHermiteRule rule;
  rule.x.assign(n, 0.0);
  rule.w.assign(n, 0.0);

  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) -
          1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(n, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * rule.x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * rule.x[1];
    } else {
      z = 2.0 * z - rule.x[i - 2];
    }

    double pp = 0.0;
    for (int it = 0; it < kMaxNewton; ++it) {
      double p1 = kPim4;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= kTol) break;
    }

    // Largest root first; mirrored into the lower half.
    rule.x[i] = z;
    rule.x[n - 1 - i] = -z;
    rule.w[i] = 2.0 / (pp * pp);
    rule.w[n - 1 - i] = rule.w[i];
  }

  // Stored descending so far; flip to ascending.
  std::reverse(rule.x.begin(), rule.x.end());
  std::reverse(rule.w.begin(), rule.w.end());
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int n) {
  if (n < 1) throw std::domain_error("gauss_hermite: n must be at least 1");
  static std::mutex mu;
  static std::map<int, GaussHermiteRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, build_rule(n)).first;
  }
  return it->second;
}

}  // namespace irbmr
