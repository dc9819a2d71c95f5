#pragma once

#include <string>

#include "core/estimator.hpp"
#include "core/models.hpp"

namespace spotvol {

// Shortest 17-significant-digit decimal; identical inputs give identical text.
std::string format_real(double value);

// Fine-grid path, header `t,x,v`.
void write_path_csv(const Path& path, const std::string& file);
Path read_path_csv(const std::string& file);

// Observations, header `t,x`.
void write_obs_csv(const Observations& obs, const std::string& file);
Observations read_obs_csv(const std::string& file);

// Estimate series, header `t,sigma_p_hat,sigma_hat,ci_lo,ci_hi`; the CI
// columns stay empty when no interval was attached. With a truth path the
// columns `sigma_true,rel_err` are appended.
void write_series_csv(const VolEstimateSeries& series, const std::string& file,
                      const Path* truth = nullptr);

}  // namespace spotvol
