#include "core/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/special.hpp"
#include "core/stats.hpp"

namespace spotvol {

namespace {
constexpr double kIndexTol = 1e-9;
}

long long grid_floor(double t, double step) {
  return static_cast<long long>(std::floor(t / step + kIndexTol));
}

void EstimatorConfig::validate() const {
  if (!(p >= 1.0)) throw std::invalid_argument("estimator: p must be >= 1");
  if (!(delta_n > 0.0)) throw std::invalid_argument("estimator: delta_n must be > 0");
  if (!(h_n > delta_n))
    throw std::invalid_argument("estimator: h_n must exceed delta_n (shrinking-window regime)");
}

double abs_moment(double p) { return gaussian_abs_moment(p); }

double power_variation(const Observations& obs, double p, double t) {
  if (obs.x.size() < 1) throw std::invalid_argument("power_variation: empty observations");
  if (!(p >= 0.0)) throw std::invalid_argument("power_variation: p must be >= 0");
  if (t < -kIndexTol || t > obs.last_time() + kIndexTol)
    throw std::out_of_range("power_variation: t outside the observation range");
  const long long last = grid_floor(std::max(t, 0.0), obs.delta_n);
  const auto hi = std::min<std::size_t>(static_cast<std::size_t>(std::max(last, 0ll)),
                                        obs.x.size() - 1);
  double sum = 0.0;
  for (std::size_t i = 1; i <= hi; ++i) sum += pow_abs(obs.x[i] - obs.x[i - 1], p);
  return sum;
}

std::pair<std::size_t, std::size_t> window_index_range(const Observations& obs,
                                                       const EstimatorConfig& cfg,
                                                       double t) {
  const long long lo = grid_floor(t, cfg.delta_n);
  const long long hi = grid_floor(t + cfg.h_n, cfg.delta_n);
  const auto last = static_cast<long long>(obs.x.size()) - 1;
  return {static_cast<std::size_t>(std::clamp(lo, 0ll, last)),
          static_cast<std::size_t>(std::clamp(hi, 0ll, last))};
}

double sigma_p_estimate(const Observations& obs, const EstimatorConfig& cfg, double t) {
  cfg.validate();
  if (obs.x.size() < 2) throw std::invalid_argument("sigma_p_estimate: need >= 2 observations");
  if (t < -kIndexTol || t > obs.last_time() - cfg.h_n + kIndexTol)
    throw std::out_of_range("sigma_p_estimate: t beyond T - h_n");
  const auto [lo, hi] = window_index_range(obs, cfg, t);
  double sum = 0.0;
  for (std::size_t i = lo + 1; i <= hi; ++i) sum += pow_abs(obs.x[i] - obs.x[i - 1], cfg.p);
  return std::pow(cfg.delta_n, 1.0 - 0.5 * cfg.p) * sum / (abs_moment(cfg.p) * cfg.h_n);
}

VolEstimateSeries estimate_series(const Observations& obs, const EstimatorConfig& cfg,
                                  std::span<const double> grid) {
  cfg.validate();
  VolEstimateSeries series;
  series.times.reserve(grid.size());
  series.sigma_p_hat.reserve(grid.size());
  series.sigma_hat.reserve(grid.size());
  const double inv_p = 1.0 / cfg.p;
  for (double t : grid) {
    const double value = sigma_p_estimate(obs, cfg, t);
    series.times.push_back(t);
    series.sigma_p_hat.push_back(value);
    series.sigma_hat.push_back(std::pow(value, inv_p));
  }
  return series;
}

std::vector<double> default_grid(const Observations& obs, const EstimatorConfig& cfg) {
  cfg.validate();
  std::vector<double> grid;
  const double t_max = obs.last_time() - cfg.h_n;
  const long long first = static_cast<long long>(
      std::ceil(cfg.h_n / cfg.delta_n - kIndexTol));
  for (long long i = first;; ++i) {
    const double t = static_cast<double>(i) * cfg.delta_n;
    if (t > t_max + kIndexTol) break;
    grid.push_back(t);
  }
  return grid;
}

double integrated_pvar_oracle(const Path& path, double p, double t) {
  if (path.v.empty()) throw std::invalid_argument("integrated_pvar_oracle: empty path");
  if (!(p >= 0.0)) throw std::invalid_argument("integrated_pvar_oracle: p must be >= 0");
  if (t < -kIndexTol || t > path.t_end + kIndexTol)
    throw std::out_of_range("integrated_pvar_oracle: t outside [0, t_end]");
  const long long raw = grid_floor(std::max(t, 0.0), path.dt_fine);
  const auto count = std::min<std::size_t>(static_cast<std::size_t>(std::max(raw, 0ll)),
                                           path.v.size() - 1);
  CompensatedSum sum;
  for (std::size_t k = 0; k < count; ++k)
    sum.add(pow_nonneg(path.v[k], 0.5 * p) * path.dt_fine);
  return sum.value();
}

}  // namespace spotvol
