#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "core/estimator.hpp"
#include "core/inference.hpp"
#include "core/models.hpp"

namespace spotvol {

// Monte Carlo plan over the (p, n, rho) grid. Observation step is 1/n on the
// unit horizon; the window is h_n = n^{rho-1}. Paths are simulated on a fine
// grid of step delta_n / fine_factor.
struct ExperimentPlan {
  ModelSpec model;
  std::vector<std::uint64_t> n_values;
  std::vector<double> rho_values;
  std::vector<double> p_values;
  std::uint32_t n_paths = 1;
  SeedSpec seed;
  double t_probe = 0.5;
  double level = 0.95;
  std::uint32_t fine_factor = 100;
  std::uint32_t threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

struct ReportCell {
  double p = 0.0;
  std::uint64_t n = 0;
  double rho = 0.0;
  double h_n = 0.0;
  double r_n = 0.0;
  std::uint32_t n_paths = 0;

  double mean_e = NAN;   // mean relative error (error table) or probe error (rate fit)
  double se_e = NAN;
  double coverage = NAN;
  double se_cov = NAN;
  double fitted_rate = NAN;     // log-log slope over n for this (p, rho) group
  double predicted_rate = NAN;  // -rate_exponent from the window scheme
  double clamp_frac = NAN;
  double stud_mean = NAN;  // studentized probe errors (coverage mode)
  double stud_var = NAN;
  double ks_dist = NAN;

  std::uint64_t beyond_domain_points = 0;  // grid points past T - h_n
  std::uint64_t zero_sigma_points = 0;     // excluded sigma(k/n) = 0 points
  std::string regime_warning;              // empty when the regime matches
};

struct ExperimentReport {
  std::string mode;  // "error_table" | "coverage" | "rate_fit"
  std::vector<ReportCell> cells;

  struct BestRho {
    double p = 0.0;
    std::uint64_t n = 0;
    double rho = 0.0;
  };
  std::vector<BestRho> best_rho;  // error-table mode: argmin over rho per (p, n)

  const ReportCell& cell(double p, std::uint64_t n, double rho) const;
  double best_rho_for(double p, std::uint64_t n) const;
  void write_csv(const std::string& file) const;
  void print(std::ostream& out) const;
};

struct MeanRelativeError {
  double value = NAN;
  std::uint64_t points_used = 0;
  std::uint64_t zero_sigma_excluded = 0;
  std::uint64_t beyond_domain_excluded = 0;
};

// Mean relative error of the estimated volatility path against the simulated
// truth, on the observation times k*delta_n restricted to [0, T - h_n]:
//   mean over k of |Sigma_{k dn}^{1/p} - sigma(k dn)| / sigma(k dn).
MeanRelativeError mean_relative_error_detail(const Path& path, const Observations& obs,
                                             const EstimatorConfig& cfg);
double mean_relative_error(const Path& path, const Observations& obs,
                           const EstimatorConfig& cfg);

// One row per (p, n, rho): per-path mean relative errors aggregated over
// n_paths simulations, plus the rho that minimizes each (p, n) group.
ExperimentReport run_error_table(const ExperimentPlan& plan);

// Empirical confidence-interval coverage and studentized-error diagnostics
// at t_probe.
ExperimentReport coverage_experiment(const ExperimentPlan& plan);

// Log-log regression of the mean probe error against n per (p, rho) group;
// needs at least three n values.
ExperimentReport rate_fit(const ExperimentPlan& plan);

// Static-partition parallel loop; worker w handles a contiguous index block,
// results must be written to per-index slots to stay schedule-independent.
void parallel_for(std::uint64_t count, std::uint32_t threads,
                  const std::function<void(std::uint64_t)>& body);

}  // namespace spotvol
