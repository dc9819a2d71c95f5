#pragma once

namespace spotvol {

// E|U|^p for U ~ N(0,1): 2^{p/2} Gamma((p+1)/2) / sqrt(pi).
// Even integer orders use the double-factorial form and are exact.
double gaussian_abs_moment(double p);

// Standard normal CDF.
double normal_cdf(double x);

// Inverse standard normal CDF on (0,1), full double precision.
double normal_quantile(double prob);

// Two-sided quantile for a confidence level in [0,1): z with
// P(|U| <= z) = level. level = 0 gives z = 0.
double two_sided_normal_quantile(double level);

// |x|^p with fast paths for the small integer and half-integer orders the
// estimators use in hot loops.
double pow_abs(double x, double p);

// x^p for x >= 0 (spot-variance powers v^{p/2}).
double pow_nonneg(double x, double p);

}  // namespace spotvol
