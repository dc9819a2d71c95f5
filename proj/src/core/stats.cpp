#include "core/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/special.hpp"

namespace spotvol {

SampleStats summarize(std::span<const double> values) {
  SampleStats stats;
  stats.count = values.size();
  if (values.empty()) return stats;
  CompensatedSum total;
  for (double v : values) total.add(v);
  stats.mean = total.value() / static_cast<double>(values.size());
  if (values.size() < 2) return stats;
  CompensatedSum squares;
  for (double v : values) {
    const double d = v - stats.mean;
    squares.add(d * d);
  }
  stats.variance = squares.value() / static_cast<double>(values.size() - 1);
  stats.std_error = std::sqrt(stats.variance / static_cast<double>(values.size()));
  return stats;
}

LinearFit ols_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("ols_fit: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("ols_fit: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("ols_fit: degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n >= 3) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.slope_std_error = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  return fit;
}

double ks_distance_to_normal(std::vector<double> sample) {
  if (sample.empty()) throw std::invalid_argument("ks distance: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double dist = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double cdf = normal_cdf(sample[i]);
    const double above = (static_cast<double>(i) + 1.0) / n - cdf;
    const double below = cdf - static_cast<double>(i) / n;
    dist = std::max(dist, std::max(above, below));
  }
  return dist;
}

}  // namespace spotvol
