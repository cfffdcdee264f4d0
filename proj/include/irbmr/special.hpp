#pragma once

namespace irbmr {

// Regularized incomplete beta function I_x(a, b) for a, b > 0, x in [0, 1].
double ibeta(double a, double b, double x);

// Upper regularized incomplete gamma function Q(a, x) for a > 0, x >= 0.
double gamma_q(double a, double x);

// Two-sided p-value of a Student-t statistic with nu > 0 degrees of freedom.
double student_t_two_sided_p(double t, double nu);

// Survival function of the chi-squared distribution. Degrees of freedom may
// be fractional (needed for effective-degrees-of-freedom tests).
double chi2_sf(double x, double df);

}  // namespace irbmr
