#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "core/models.hpp"

namespace spotvol {

// One estimation run: power order p, observation step delta_n, window h_n.
struct EstimatorConfig {
  double p = 2.0;
  double delta_n = 0.0;
  double h_n = 0.0;

  // r_n = h_n / delta_n, the expected number of observations per window.
  double window_ratio() const { return h_n / delta_n; }
  // The central limit theory covers p = 2 or p >= 3; other orders only
  // inherit the law of large numbers.
  bool theorem_backed() const { return p == 2.0 || p >= 3.0; }
  void validate() const;  // throws std::invalid_argument
};

struct VolEstimateSeries {
  std::vector<double> times;
  std::vector<double> sigma_p_hat;  // windowed estimate of sigma_t^p
  std::vector<double> sigma_hat;    // its p-th root
  std::vector<double> ci_lo;        // sigma-scale interval, empty until attached
  std::vector<double> ci_hi;

  std::size_t size() const { return times.size(); }
  bool has_ci() const { return !ci_lo.empty(); }
};

// p-th absolute moment of a standard normal (m_p).
double abs_moment(double p);

// Power variation up to t: sum of |X_{i dn} - X_{(i-1) dn}|^p for
// i = 1..floor(t/dn). Nonnegative and nondecreasing in t.
double power_variation(const Observations& obs, double p, double t);

// Windowed estimate of sigma_t^p:
//   delta_n^{1-p/2} (B(p)_{t+h_n} - B(p)_t) / (m_p h_n),
// the increments being exactly those with floor(t/dn) < i <= floor((t+h_n)/dn).
double sigma_p_estimate(const Observations& obs, const EstimatorConfig& cfg, double t);

// The window's increment index range (lo, hi]: lo = floor(t/dn),
// hi = floor((t+h_n)/dn), capped at the last increment.
std::pair<std::size_t, std::size_t> window_index_range(const Observations& obs,
                                                       const EstimatorConfig& cfg,
                                                       double t);

VolEstimateSeries estimate_series(const Observations& obs, const EstimatorConfig& cfg,
                                  std::span<const double> grid);

// Observation times restricted to [h_n, T - h_n].
std::vector<double> default_grid(const Observations& obs, const EstimatorConfig& cfg);

// A(p)_t = int_0^t sigma_s^p ds as a left-endpoint Riemann sum on the
// path's fine grid; the law-of-large-numbers oracle.
double integrated_pvar_oracle(const Path& path, double p, double t);

// floor(t / step) with the project-wide 1e-9 alignment tolerance.
long long grid_floor(double t, double step);

}  // namespace spotvol
