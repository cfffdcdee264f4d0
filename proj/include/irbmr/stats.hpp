#pragma once

#include <string>
#include <vector>

namespace irbmr {

// A labelled annual series. Years are optional (empty for synthetic data)
// but when present must match values in length.
struct SampleSeries {
  std::string label;
  std::vector<int> years;
  std::vector<double> values;
};

struct DescribeResult {
  int n = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double median = 0.0;  // midpoint convention for even n
  double std_dev = 0.0; // sample standard deviation (n - 1)
};

DescribeResult describe(const std::vector<double>& values);

// Phi^{-1} applied elementwise. Throws std::domain_error when any value
// falls outside the open unit interval.
std::vector<double> probit_transform(const std::vector<double>& rates);

struct ShapiroWilkResult {
  double w = 0.0;
  double p = 0.0;
  int n = 0;
};

// Shapiro-Wilk normality test, Royston's AS R94 approximation of the weights
// and of the null distribution of W. Valid for 3 <= n <= 5000, uncensored
// samples. Throws std::domain_error for unusable samples (too small, too
// large, or with zero range).
ShapiroWilkResult shapiro_wilk(std::vector<double> sample);

struct BivariateNormalityResult {
  double h = 0.0;           // Royston's H statistic
  double edf = 0.0;         // effective degrees of freedom
  double p = 0.0;           // P(chi2_edf > H)
  double w_equivalent = 0.0;  // W whose marginal p equals the joint p
  ShapiroWilkResult margin_x;
  ShapiroWilkResult margin_y;
};

// Royston's extension of Shapiro-Wilk to a bivariate sample: each margin's W
// is mapped to a normal equivalent deviate, the deviates are turned into
// chi-square contributions, and their sum is referred to a chi-square with
// correlation-adjusted effective degrees of freedom. w_equivalent transforms
// the joint p-value back to the W scale of a single test at the same n.
BivariateNormalityResult royston_bivariate(const std::vector<double>& x,
                                           const std::vector<double>& y);

struct PearsonResult {
  double r = 0.0;
  double ci_lo = 0.0;  // Fisher z interval
  double ci_hi = 0.0;
  double t = 0.0;      // r sqrt((n-2)/(1-r^2))
  double p = 0.0;      // two-sided, Student-t with n-2 dof
  int n = 0;
};

PearsonResult pearson(const std::vector<double>& x,
                      const std::vector<double>& y, double ci_level = 0.95);

struct LinearFitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double adj_r2 = 0.0;
  double slope_p = 0.0;  // two-sided p-value of slope != 0
  int n = 0;
};

// Ordinary least squares of y on x.
LinearFitResult linear_fit(const std::vector<double>& x,
                           const std::vector<double>& y);

struct QQPoint {
  double theoretical = 0.0;
  double sample = 0.0;
};

// Normal quantile-quantile points with Blom plotting positions
// (i - 0.375) / (n + 0.25). With standardize set, sample values are
// centered and scaled to unit sample standard deviation.
std::vector<QQPoint> qq_points(std::vector<double> sample,
                               bool standardize = true);

}  // namespace irbmr
