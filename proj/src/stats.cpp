#include "irbmr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

#include "irbmr/normal.hpp"
#include "irbmr/special.hpp"

namespace irbmr {

namespace {

double polynomial(const double* c, int nord, double x) {
  double acc = c[0];
  double xp = 1.0;
  for (int i = 1; i < nord; ++i) {
    xp *= x;
    acc += c[i] * xp;
  }
  return acc;
}

// AS R94 (Royston 1995) constants. c1/c2 correct the two largest Blom-score
// weights, c3..c6 parameterize the null distribution of W, g guards the
// log-log transform for very small samples.
constexpr double kC1[6] = {0.0,       0.221157, -0.147981,
                           -2.071190, 4.434685, -2.706056};
constexpr double kC2[6] = {0.0,       0.042981, -0.293762,
                           -1.752461, 5.682633, -3.582633};
constexpr double kC3[4] = {0.5440, -0.39978, 0.025054, -6.714e-4};
constexpr double kC4[4] = {1.3822, -0.77857, 0.062767, -0.0020322};
constexpr double kC5[4] = {-1.5861, -0.31082, -0.083751, 0.0038915};
constexpr double kC6[3] = {-0.4803, -0.082676, 0.0030302};
constexpr double kG[2] = {-2.273, 0.459};
constexpr double kPi6 = 1.9098593171027440292;   // 6 / pi
constexpr double kStqr = 1.0471975511965977462;  // pi / 3

struct SwTail {
  double p = 0.0;
  double z = 0.0;  // normal equivalent deviate, upper tail
};

// Null-distribution transform of AS R94: maps (1 - W) to a standard normal
// deviate, exact arcsine law at n = 3.
SwTail sw_tail(double w1, int n) {
  SwTail out;
  if (n == 3) {
    const double w = 1.0 - w1;
    const double p =
        std::clamp(kPi6 * (std::asin(std::sqrt(w)) - kStqr), 1.0e-19, 1.0);
    out.p = p;
    out.z = norm_quantile(1.0 - std::min(p, 1.0 - 1.0e-16));
    return out;
  }
  double y = std::log(w1);
  double m;
  double s;
  if (n <= 11) {
    const double an = n;
    const double gamma = polynomial(kG, 2, an);
    if (y >= gamma) {
      out.p = 1.0e-19;
      out.z = 9.0;
      return out;
    }
    y = -std::log(gamma - y);
    m = polynomial(kC3, 4, an);
    s = std::exp(polynomial(kC4, 4, an));
  } else {
    const double lx = std::log(static_cast<double>(n));
    m = polynomial(kC5, 4, lx);
    s = std::exp(polynomial(kC6, 3, lx));
  }
  out.z = (y - m) / s;
  out.p = norm_cdf(-out.z);
  return out;
}

// Inverse of sw_tail: the W whose upper-tail probability at sample size n
// equals p. Used to express a joint test result on the familiar W scale.
double sw_w_from_p(double p, int n) {
  p = std::clamp(p, 1.0e-15, 1.0 - 1.0e-15);
  if (n == 3) {
    const double s = std::sin(p / kPi6 + kStqr);
    return s * s;
  }
  const double z = norm_quantile(1.0 - p);
  double w1;
  if (n <= 11) {
    const double an = n;
    const double gamma = polynomial(kG, 2, an);
    const double m = polynomial(kC3, 4, an);
    const double s = std::exp(polynomial(kC4, 4, an));
    const double y = m + s * z;
    w1 = std::exp(gamma - std::exp(-y));
  } else {
    const double lx = std::log(static_cast<double>(n));
    const double m = polynomial(kC5, 4, lx);
    const double s = std::exp(polynomial(kC6, 3, lx));
    w1 = std::exp(m + s * z);
  }
  return 1.0 - w1;
}

struct SwCore {
  double w = 0.0;
  double w1 = 0.0;  // 1 - w carried separately to avoid cancellation
};

SwCore sw_statistic(std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  std::sort(x.begin(), x.end());
  if (!(x.back() - x.front() > 0.0)) {
    throw std::domain_error("shapiro_wilk: sample has zero range");
  }

  const int n2 = n / 2;
  std::vector<double> a(n2);  // weights for the upper half, positive
  if (n == 3) {
    a[0] = std::sqrt(0.5);
  } else {
    const double an25 = n + 0.25;
    double summ2 = 0.0;
    for (int i = 0; i < n2; ++i) {
      a[i] = norm_quantile((i + 1 - 0.375) / an25);  // lower-half scores
      summ2 += a[i] * a[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(static_cast<double>(n));
    const double a1 = polynomial(kC1, 6, rsn) - a[0] / ssumm2;
    int i1;
    double fac;
    if (n > 5) {
      i1 = 3;
      const double a2 = -a[1] / ssumm2 + polynomial(kC2, 6, rsn);
      fac = std::sqrt((summ2 - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1]) /
                      (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[0] = a1;
      a[1] = a2;
    } else {
      i1 = 2;
      fac = std::sqrt((summ2 - 2.0 * a[0] * a[0]) / (1.0 - 2.0 * a1 * a1));
      a[0] = a1;
    }
    for (int i = i1 - 1; i < n2; ++i) a[i] = -a[i] / fac;
  }

  // W as the squared correlation between the data and the antisymmetric
  // weight vector; 1 - W is formed first, which stays accurate when W is
  // very close to one.
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ssx = 0.0;
  for (double v : x) ssx += (v - mean) * (v - mean);
  double sax = 0.0;
  double ssa = 0.0;
  for (int i = 0; i < n2; ++i) {
    sax += a[i] * (x[n - 1 - i] - x[i]);
    ssa += 2.0 * a[i] * a[i];
  }
  const double ssassx = std::sqrt(ssa * ssx);
  SwCore out;
  // Roundoff can push the difference a few ulps outside [0, 1] when the fit
  // is essentially perfect; clamp before the tail transforms see it.
  out.w1 = std::clamp((ssassx - sax) * (ssassx + sax) / (ssa * ssx), 0.0, 1.0);
  out.w = 1.0 - out.w1;
  return out;
}

void require_same_size(const std::vector<double>& x,
                       const std::vector<double>& y, const char* what) {
  if (x.size() != y.size()) {
    throw std::domain_error(std::string(what) +
                            ": series must have equal length");
  }
}

struct CenteredSums {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
};

CenteredSums centered_sums(const std::vector<double>& x,
                           const std::vector<double>& y) {
  CenteredSums s;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    s.mean_x += x[i];
    s.mean_y += y[i];
  }
  s.mean_x /= static_cast<double>(n);
  s.mean_y /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - s.mean_x;
    const double dy = y[i] - s.mean_y;
    s.sxx += dx * dx;
    s.syy += dy * dy;
    s.sxy += dx * dy;
  }
  return s;
}

}  // namespace

DescribeResult describe(const std::vector<double>& values) {
  if (values.empty()) {
    throw std::domain_error("describe: sample must be non-empty");
  }
  DescribeResult out;
  out.n = static_cast<int>(values.size());
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  out.min = sorted.front();
  out.max = sorted.back();
  const int n = out.n;
  out.median = (n % 2 == 1)
                   ? sorted[n / 2]
                   : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  double mean = 0.0;
  for (double v : sorted) mean += v;
  mean /= n;
  out.mean = mean;
  if (n > 1) {
    double ss = 0.0;
    for (double v : sorted) ss += (v - mean) * (v - mean);
    out.std_dev = std::sqrt(ss / (n - 1));
  }
  return out;
}

std::vector<double> probit_transform(const std::vector<double>& rates) {
  std::vector<double> out;
  out.reserve(rates.size());
  for (double r : rates) {
    if (!(r > 0.0 && r < 1.0)) {
      throw std::domain_error(
          "probit_transform: rates must lie strictly inside (0, 1)");
    }
    out.push_back(norm_quantile(r));
  }
  return out;
}

ShapiroWilkResult shapiro_wilk(std::vector<double> sample) {
  const int n = static_cast<int>(sample.size());
  if (n < 3) {
    throw std::domain_error("shapiro_wilk: need at least 3 observations");
  }
  if (n > 5000) {
    throw std::domain_error(
        "shapiro_wilk: approximation not calibrated beyond n = 5000");
  }
  const SwCore core = sw_statistic(sample);
  ShapiroWilkResult out;
  out.n = n;
  out.w = core.w;
  out.p = sw_tail(core.w1, n).p;
  return out;
}

BivariateNormalityResult royston_bivariate(const std::vector<double>& x,
                                           const std::vector<double>& y) {
  require_same_size(x, y, "royston_bivariate");
  const int n = static_cast<int>(x.size());
  if (n < 10 || n > 2000) {
    throw std::domain_error(
        "royston_bivariate: calibrated for 10 <= n <= 2000");
  }

  std::vector<double> xs = x;
  std::vector<double> ys = y;
  const SwCore cx = sw_statistic(xs);
  const SwCore cy = sw_statistic(ys);
  const SwTail tx = sw_tail(cx.w1, n);
  const SwTail ty = sw_tail(cy.w1, n);

  // Each margin's deviate becomes a chi-square(1)-like contribution through
  // the folded-normal transform.
  auto contribution = [](double z) {
    const double q = std::max(0.5 * norm_cdf(-z), 1.0e-300);
    const double g = norm_quantile(q);
    return g * g;
  };
  const double rx = contribution(tx.z);
  const double ry = contribution(ty.z);

  // Effective degrees of freedom from the correlation between the margins
  // (Royston 1992 transform of the Pearson correlation).
  const CenteredSums s = centered_sums(x, y);
  if (!(s.sxx > 0.0) || !(s.syy > 0.0)) {
    throw std::domain_error("royston_bivariate: a margin has zero variance");
  }
  const double r = std::clamp(s.sxy / std::sqrt(s.sxx * s.syy), -1.0, 1.0);
  const double ln_n = std::log(static_cast<double>(n));
  const double u = 0.715;
  const double v =
      0.21364 + 0.015124 * ln_n * ln_n - 0.0018034 * ln_n * ln_n * ln_n;
  const double c =
      std::pow(r, 5.0) * (1.0 - u * std::pow(1.0 - r, u) / v);

  BivariateNormalityResult out;
  out.edf = 2.0 / (1.0 + c);
  out.h = out.edf * (rx + ry) / 2.0;
  out.p = chi2_sf(out.h, out.edf);
  out.w_equivalent = sw_w_from_p(out.p, n);
  out.margin_x = {cx.w, tx.p, n};
  out.margin_y = {cy.w, ty.p, n};
  return out;
}

PearsonResult pearson(const std::vector<double>& x,
                      const std::vector<double>& y, double ci_level) {
  require_same_size(x, y, "pearson");
  const int n = static_cast<int>(x.size());
  if (n < 4) {
    throw std::domain_error("pearson: need at least 4 paired observations");
  }
  if (!(ci_level > 0.0 && ci_level < 1.0)) {
    throw std::domain_error("pearson: ci_level must lie in (0, 1)");
  }
  const CenteredSums s = centered_sums(x, y);
  if (!(s.sxx > 0.0) || !(s.syy > 0.0)) {
    throw std::domain_error("pearson: a series has zero variance");
  }

  PearsonResult out;
  out.n = n;
  out.r = std::clamp(s.sxy / std::sqrt(s.sxx * s.syy), -1.0, 1.0);

  const double r2 = out.r * out.r;
  out.t = (r2 >= 1.0) ? std::numeric_limits<double>::infinity() *
                            (out.r > 0 ? 1.0 : -1.0)
                      : out.r * std::sqrt((n - 2) / (1.0 - r2));
  out.p = student_t_two_sided_p(out.t, static_cast<double>(n - 2));

  // Fisher z interval: atanh(r) is approximately normal with standard
  // error 1/sqrt(n - 3).
  const double zr = std::atanh(out.r);
  const double half =
      norm_quantile(0.5 + 0.5 * ci_level) / std::sqrt(static_cast<double>(n - 3));
  out.ci_lo = std::tanh(zr - half);
  out.ci_hi = std::tanh(zr + half);
  return out;
}

LinearFitResult linear_fit(const std::vector<double>& x,
                           const std::vector<double>& y) {
  require_same_size(x, y, "linear_fit");
  const int n = static_cast<int>(x.size());
  if (n < 3) {
    throw std::domain_error("linear_fit: need at least 3 observations");
  }
  const CenteredSums s = centered_sums(x, y);
  if (!(s.sxx > 0.0)) {
    throw std::domain_error("linear_fit: regressor has zero variance");
  }
  if (!(s.syy > 0.0)) {
    throw std::domain_error("linear_fit: response has zero variance");
  }

  LinearFitResult out;
  out.n = n;
  out.slope = s.sxy / s.sxx;
  out.intercept = s.mean_y - out.slope * s.mean_x;
  const double ss_res = std::max(0.0, s.syy - out.slope * s.sxy);
  out.r2 = 1.0 - ss_res / s.syy;
  out.adj_r2 = 1.0 - (1.0 - out.r2) * (n - 1) / static_cast<double>(n - 2);

  const double se2 = (ss_res / (n - 2)) / s.sxx;
  if (se2 <= 0.0) {
    out.slope_p = (out.slope == 0.0) ? 1.0 : 0.0;
  } else {
    const double t = out.slope / std::sqrt(se2);
    out.slope_p = student_t_two_sided_p(t, static_cast<double>(n - 2));
  }
  return out;
}

std::vector<QQPoint> qq_points(std::vector<double> sample, bool standardize) {
  const int n = static_cast<int>(sample.size());
  if (n < 2) {
    throw std::domain_error("qq_points: need at least 2 observations");
  }
  std::sort(sample.begin(), sample.end());

  double shift = 0.0;
  double scale = 1.0;
  if (standardize) {
    double mean = 0.0;
    for (double v : sample) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : sample) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1));
    if (!(sd > 0.0)) {
      throw std::domain_error("qq_points: sample has zero variance");
    }
    shift = mean;
    scale = sd;
  }

  std::vector<QQPoint> out(n);
  for (int i = 0; i < n; ++i) {
    out[i].theoretical = norm_quantile((i + 1 - 0.375) / (n + 0.25));
    out[i].sample = (sample[i] - shift) / scale;
  }
  return out;
}

}  // namespace irbmr
