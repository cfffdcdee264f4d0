#pragma once

namespace irbmr {

// Standard normal density.
double norm_pdf(double x) noexcept;

// Standard normal CDF. Evaluated through erfc so the lower tail keeps
// full relative accuracy down to the smallest representable results.
double norm_cdf(double x) noexcept;

// Inverse of the standard normal CDF. Wichura's algorithm AS 241 (PPND16),
// accurate to close to machine precision over the whole open interval.
// Throws std::domain_error for p outside (0, 1).
double norm_quantile(double p);

}  // namespace irbmr
