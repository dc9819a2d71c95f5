#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace spotvol {

// Neumaier-compensated accumulator; deterministic for a fixed add order.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double value) {
    const double t = sum + value;
    if (std::abs(sum) >= std::abs(value))
      carry += (sum - t) + value;
    else
      carry += (value - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

struct SampleStats {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;   // unbiased, 0 when count < 2
  double std_error = 0.0;  // sqrt(variance / count)
};

SampleStats summarize(std::span<const double> values);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_std_error = 0.0;
};

// Ordinary least squares of y against x; requires >= 3 points for the
// slope standard error.
LinearFit ols_fit(std::span<const double> x, std::span<const double> y);

// Kolmogorov-Smirnov distance between the sample and the standard normal.
double ks_distance_to_normal(std::vector<double> sample);

}  // namespace spotvol
