#include "core/special.hpp"

#include <cmath>
#include <stdexcept>

namespace spotvol {

double gaussian_abs_moment(double p) {
  if (!(p >= 0.0)) throw std::invalid_argument("gaussian_abs_moment: p must be >= 0");
  if (p == std::round(p) && std::fmod(p, 2.0) == 0.0 && p <= 300.0) {
    double moment = 1.0;  // (p-1)!!
    for (double k = p; k >= 2.0; k -= 2.0) moment *= k - 1.0;
    return moment;
  }
  return std::pow(2.0, 0.5 * p) * std::tgamma(0.5 * (p + 1.0)) / std::sqrt(M_PI);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

namespace {

// Acklam's rational approximation, |rel err| < 1.15e-9.
double normal_quantile_seed(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0))
    throw std::invalid_argument("normal_quantile: probability must lie in (0,1)");
  double x = normal_quantile_seed(prob);
  // One Halley step against erfc brings the seed to full precision.
  const double err = normal_cdf(x) - prob;
  const double u = err * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double two_sided_normal_quantile(double level) {
  if (!(level >= 0.0 && level < 1.0))
    throw std::invalid_argument("confidence level must lie in [0,1)");
  if (level == 0.0) return 0.0;
  return normal_quantile(0.5 * (1.0 + level));
}

double pow_nonneg(double x, double p) {
  if (p == 1.0) return x;
  if (p == 2.0) return x * x;
  if (p == 0.5) return std::sqrt(x);
  if (p == 1.5) return x * std::sqrt(x);
  if (p == 3.0) return x * x * x;
  if (p == 4.0) {
    const double sq = x * x;
    return sq * sq;
  }
  if (p == 0.0) return 1.0;
  return std::pow(x, p);
}

double pow_abs(double x, double p) { return pow_nonneg(std::abs(x), p); }

}  // namespace spotvol
