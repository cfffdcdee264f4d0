#include "irbmr/normal.hpp"

#include <cmath>
#include <stdexcept>

namespace irbmr {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
constexpr double kInvSqrt2 = 0.7071067811865475244008444;

}  // namespace

double norm_pdf(double x) noexcept {
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double norm_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

// AS 241, PPND16 (Wichura, 1988). Rational minimax approximations on three
// regions split at |p - 1/2| = 0.425 and sqrt(-log(min(p, 1-p))) = 5.
double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("norm_quantile: p must lie in (0, 1)");
  }

  static constexpr double a[8] = {
      3.3871328727963666080e+0, 1.3314166789178437745e+2,
      1.9715909503065514427e+3, 1.3731693765509461125e+4,
      4.5921953931549871457e+4, 6.7265770927008700853e+4,
      3.3430575583588128105e+4, 2.5090809287301226727e+3};
  static constexpr double b[7] = {
      4.2313330701600911252e+1, 6.8718700749205790830e+2,
      5.3941960214247511077e+3, 2.1213794301586595867e+4,
      3.9307895800092710610e+4, 2.8729085735721942674e+4,
      5.2264952788528545610e+3};
  static constexpr double c[8] = {
      1.42343711074968357734e+0, 4.63033784615654529590e+0,
      5.76949722146069140550e+0, 3.64784832476320460504e+0,
      1.27045825245236838258e+0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static constexpr double d[7] = {
      2.05319162663775882187e+0, 1.67638483018380384940e+0,
      6.89767334985100004550e-1, 1.48103976427480074590e-1,
      1.51986665636164571966e-2, 5.47593808499534494600e-4,
      1.05075007164441684324e-9};
  static constexpr double e[8] = {
      6.65790464350110377720e+0, 5.46378491116411436990e+0,
      1.78482653991729133580e+0, 2.96560571828504891230e-1,
      2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr double f[7] = {
      5.99832206555887937690e-1, 1.36929880922735805310e-1,
      1.48753612908506148525e-2, 7.86869131145613259100e-4,
      1.84631831751005468180e-5, 1.42151175831644588870e-7,
      2.04426310338993978564e-15};

  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((a[7] * r + a[6]) * r + a[5]) * r + a[4]) * r + a[3]) * r +
           a[2]) *
              r +
          a[1]) *
             r +
         a[0]);
    const double den =
        (((((((b[6] * r + b[5]) * r + b[4]) * r + b[3]) * r + b[2]) * r +
           b[1]) *
              r +
          b[0]) *
             r +
         1.0);
    return q * num / den;
  }

  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((c[7] * r + c[6]) * r + c[5]) * r + c[4]) * r + c[3]) * r +
           c[2]) *
              r +
          c[1]) *
             r +
         c[0]);
    const double den =
        (((((((d[6] * r + d[5]) * r + d[4]) * r + d[3]) * r + d[2]) * r +
           d[1]) *
              r +
          d[0]) *
             r +
         1.0);
    val = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((e[7] * r + e[6]) * r + e[5]) * r + e[4]) * r + e[3]) * r +
           e[2]) *
              r +
          e[1]) *
             r +
         e[0]);
    const double den =
        (((((((f[6] * r + f[5]) * r + f[4]) * r + f[3]) * r + f[2]) * r +
           f[1]) *
              r +
          f[0]) *
             r +
         1.0);
    val = num / den;
  }
  return (q < 0.0) ? -val : val;
}

}  // namespace irbmr
