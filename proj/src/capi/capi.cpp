#include "spotvol/spotvol.h"

#include <cstring>
#include <exception>
#include <iostream>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>

#include "core/csv.hpp"
#include "core/estimator.hpp"
#include "core/experiments.hpp"
#include "core/inference.hpp"
#include "core/models.hpp"
#include "core/rng.hpp"
#include "core/sampling.hpp"

struct spotvol_path {
  spotvol::Path impl;
};
struct spotvol_obs {
  spotvol::Observations impl;
};
struct spotvol_series {
  spotvol::VolEstimateSeries impl;
};
struct spotvol_report {
  spotvol::ExperimentReport impl;
};

namespace {

thread_local std::string g_last_error;

spotvol_status fail(spotvol_status status, const char* what) {
  g_last_error = what ? what : "";
  return status;
}

template <typename Fn>
spotvol_status guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SPOTVOL_OK;
  } catch (const std::out_of_range& e) {
    return fail(SPOTVOL_ERR_RANGE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(SPOTVOL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::runtime_error& e) {
    return fail(SPOTVOL_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SPOTVOL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SPOTVOL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SPOTVOL_ERR_INTERNAL, "unknown error");
  }
}

spotvol_status require(bool ok, const char* what) {
  return ok ? SPOTVOL_OK : fail(SPOTVOL_ERR_INVALID_ARGUMENT, what);
}

spotvol::SeedSpec to_core(spotvol_seed seed) { return {seed.master_seed, seed.stream_id}; }

spotvol::TemperedStableParams to_core(const spotvol_ts_params& ts) {
  return {ts.lambda, ts.beta, ts.cutoff_eps};
}

spotvol::ModelSpec to_core(const spotvol_model& model) {
  spotvol::ModelSpec spec;
  switch (model.tag) {
    case SPOTVOL_MODEL_CONSTANT_VOL:
      spec.params = spotvol::ConstantVolParams{model.sigma, model.r, model.x0};
      break;
    case SPOTVOL_MODEL_OU_VOL:
      spec.params = spotvol::OuVolParams{model.r,   model.a,  model.m, model.beta_vol,
                                         model.rho, model.x0, model.v0};
      break;
    case SPOTVOL_MODEL_BNS_JUMP:
      spec.params =
          spotvol::BnsJumpParams{model.r, model.mu, to_core(model.ts), model.x0, model.v0};
      break;
    default:
      throw std::invalid_argument("unknown model tag");
  }
  return spec;
}

spotvol::EstimatorConfig to_core(const spotvol_estimator_config& config) {
  return {config.p, config.delta_n, config.h_n};
}

spotvol::ExperimentPlan to_core(const spotvol_plan& plan) {
  spotvol::ExperimentPlan out;
  out.model = to_core(plan.model);
  if (plan.n_value_count && !plan.n_values)
    throw std::invalid_argument("plan: n_values is NULL");
  if (plan.rho_value_count && !plan.rho_values)
    throw std::invalid_argument("plan: rho_values is NULL");
  if (plan.p_value_count && !plan.p_values)
    throw std::invalid_argument("plan: p_values is NULL");
  out.n_values.assign(plan.n_values, plan.n_values + plan.n_value_count);
  out.rho_values.assign(plan.rho_values, plan.rho_values + plan.rho_value_count);
  out.p_values.assign(plan.p_values, plan.p_values + plan.p_value_count);
  out.n_paths = plan.n_paths;
  out.seed = to_core(plan.seed);
  out.t_probe = plan.t_probe;
  out.level = plan.level;
  out.fine_factor = plan.fine_factor;
  out.threads = plan.threads;
  return out;
}

}  // namespace

extern "C" {

const char* spotvol_version(void) { return "0.1.0"; }

const char* spotvol_status_name(spotvol_status status) {
  switch (status) {
    case SPOTVOL_OK: return "ok";
    case SPOTVOL_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case SPOTVOL_ERR_RANGE: return "range";
    case SPOTVOL_ERR_IO: return "io";
    case SPOTVOL_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* spotvol_last_error(void) { return g_last_error.c_str(); }

spotvol_status spotvol_sample_normal(spotvol_seed seed, size_t count, double* out) {
  if (auto bad = require(out != nullptr, "sample_normal: out is NULL")) return bad;
  return guard([&] {
    spotvol::RngStream rng(to_core(seed));
    if (count == 0) throw std::invalid_argument("sample_normal: count must be >= 1");
    for (size_t i = 0; i < count; ++i) out[i] = rng.next_normal();
  });
}

spotvol_status spotvol_sample_ig_increment(spotvol_seed seed, double dt,
                                           const spotvol_ts_params* params, double* out) {
  if (auto bad = require(params && out, "sample_ig_increment: NULL argument")) return bad;
  return guard([&] { *out = spotvol::sample_ig_increment(to_core(seed), dt, to_core(*params)); });
}

spotvol_status spotvol_sample_ts_increment(spotvol_seed seed, double dt,
                                           const spotvol_ts_params* params, double* out) {
  if (auto bad = require(params && out, "sample_ts_increment: NULL argument")) return bad;
  return guard(
      [&] { *out = spotvol::sample_ts_increment_generic(to_core(seed), dt, to_core(*params)); });
}

spotvol_status spotvol_simulate(const spotvol_model* model, double t_end, double dt_fine,
                                spotvol_seed seed, spotvol_path** out) {
  if (auto bad = require(model && out, "simulate: NULL argument")) return bad;
  return guard([&] {
    auto handle = std::make_unique<spotvol_path>();
    handle->impl = spotvol::simulate(to_core(*model), t_end, dt_fine, to_core(seed));
    *out = handle.release();
  });
}

void spotvol_path_free(spotvol_path* path) { delete path; }

size_t spotvol_path_size(const spotvol_path* path) { return path ? path->impl.size() : 0; }
double spotvol_path_dt_fine(const spotvol_path* path) {
  return path ? path->impl.dt_fine : 0.0;
}
double spotvol_path_t_end(const spotvol_path* path) { return path ? path->impl.t_end : 0.0; }
const double* spotvol_path_x(const spotvol_path* path) {
  return path && !path->impl.x.empty() ? path->impl.x.data() : nullptr;
}
const double* spotvol_path_v(const spotvol_path* path) {
  return path && !path->impl.v.empty() ? path->impl.v.data() : nullptr;
}
double spotvol_path_clamp_fraction(const spotvol_path* path) {
  return path ? path->impl.clamp_fraction() : 0.0;
}

spotvol_status spotvol_true_sigma_at(const spotvol_path* path, double t, double* out) {
  if (auto bad = require(path && out, "true_sigma_at: NULL argument")) return bad;
  return guard([&] { *out = spotvol::true_sigma_at(path->impl, t); });
}

spotvol_status spotvol_subsample(const spotvol_path* path, double delta_n,
                                 spotvol_obs** out) {
  if (auto bad = require(path && out, "subsample: NULL argument")) return bad;
  return guard([&] {
    auto handle = std::make_unique<spotvol_obs>();
    handle->impl = spotvol::subsample(path->impl, delta_n);
    *out = handle.release();
  });
}

spotvol_status spotvol_obs_create(double delta_n, const double* x, size_t count,
                                  spotvol_obs** out) {
  if (auto bad = require(x && out, "obs_create: NULL argument")) return bad;
  return guard([&] {
    if (!(delta_n > 0.0)) throw std::invalid_argument("obs_create: delta_n must be > 0");
    if (count < 2) throw std::invalid_argument("obs_create: need at least 2 observations");
    auto handle = std::make_unique<spotvol_obs>();
    handle->impl.delta_n = delta_n;
    handle->impl.x.assign(x, x + count);
    *out = handle.release();
  });
}

void spotvol_obs_free(spotvol_obs* obs) { delete obs; }

size_t spotvol_obs_size(const spotvol_obs* obs) { return obs ? obs->impl.size() : 0; }
double spotvol_obs_delta_n(const spotvol_obs* obs) { return obs ? obs->impl.delta_n : 0.0; }
const double* spotvol_obs_x(const spotvol_obs* obs) {
  return obs && !obs->impl.x.empty() ? obs->impl.x.data() : nullptr;
}

spotvol_status spotvol_path_write_csv(const spotvol_path* path, const char* file) {
  if (auto bad = require(path && file, "path_write_csv: NULL argument")) return bad;
  return guard([&] { spotvol::write_path_csv(path->impl, file); });
}

spotvol_status spotvol_path_read_csv(const char* file, spotvol_path** out) {
  if (auto bad = require(file && out, "path_read_csv: NULL argument")) return bad;
  return guard([&] {
    auto handle = std::make_unique<spotvol_path>();
    handle->impl = spotvol::read_path_csv(file);
    *out = handle.release();
  });
}

spotvol_status spotvol_obs_write_csv(const spotvol_obs* obs, const char* file) {
  if (auto bad = require(obs && file, "obs_write_csv: NULL argument")) return bad;
  return guard([&] { spotvol::write_obs_csv(obs->impl, file); });
}

spotvol_status spotvol_obs_read_csv(const char* file, spotvol_obs** out) {
  if (auto bad = require(file && out, "obs_read_csv: NULL argument")) return bad;
  return guard([&] {
    auto handle = std::make_unique<spotvol_obs>();
    handle->impl = spotvol::read_obs_csv(file);
    *out = handle.release();
  });
}

spotvol_status spotvol_abs_moment(double p, double* out) {
  if (auto bad = require(out != nullptr, "abs_moment: out is NULL")) return bad;
  return guard([&] { *out = spotvol::abs_moment(p); });
}

int spotvol_p_theorem_backed(double p) {
  return spotvol::EstimatorConfig{p, 1.0, 2.0}.theorem_backed() ? 1 : 0;
}

spotvol_status spotvol_power_variation(const spotvol_obs* obs, double p, double t,
                                       double* out) {
  if (auto bad = require(obs && out, "power_variation: NULL argument")) return bad;
  return guard([&] { *out = spotvol::power_variation(obs->impl, p, t); });
}

spotvol_status spotvol_sigma_p_estimate(const spotvol_obs* obs,
                                        const spotvol_estimator_config* config, double t,
                                        double* out) {
  if (auto bad = require(obs && config && out, "sigma_p_estimate: NULL argument")) return bad;
  return guard([&] { *out = spotvol::sigma_p_estimate(obs->impl, to_core(*config), t); });
}

spotvol_status spotvol_estimate_series(const spotvol_obs* obs,
                                       const spotvol_estimator_config* config,
                                       const double* grid, size_t grid_len, int with_ci,
                                       double level, spotvol_series** out) {
  if (auto bad = require(obs && config && out, "estimate_series: NULL argument")) return bad;
  if (auto bad = require(grid || grid_len == 0, "estimate_series: grid is NULL")) return bad;
  return guard([&] {
    const auto cfg = to_core(*config);
    std::vector<double> default_points;
    std::span<const double> points;
    if (grid) {
      points = {grid, grid_len};
    } else {
      default_points = spotvol::default_grid(obs->impl, cfg);
      points = default_points;
    }
    auto handle = std::make_unique<spotvol_series>();
    handle->impl = spotvol::estimate_series(obs->impl, cfg, points);
    if (with_ci) spotvol::attach_confidence_intervals(handle->impl, cfg, level);
    *out = handle.release();
  });
}

void spotvol_series_free(spotvol_series* series) { delete series; }

size_t spotvol_series_size(const spotvol_series* series) {
  return series ? series->impl.size() : 0;
}
const double* spotvol_series_times(const spotvol_series* series) {
  return series && !series->impl.times.empty() ? series->impl.times.data() : nullptr;
}
const double* spotvol_series_sigma_p_hat(const spotvol_series* series) {
  return series && !series->impl.sigma_p_hat.empty() ? series->impl.sigma_p_hat.data()
                                                     : nullptr;
}
const double* spotvol_series_sigma_hat(const spotvol_series* series) {
  return series && !series->impl.sigma_hat.empty() ? series->impl.sigma_hat.data() : nullptr;
}
const double* spotvol_series_ci_lo(const spotvol_series* series) {
  return series && series->impl.has_ci() ? series->impl.ci_lo.data() : nullptr;
}
const double* spotvol_series_ci_hi(const spotvol_series* series) {
  return series && series->impl.has_ci() ? series->impl.ci_hi.data() : nullptr;
}

spotvol_status spotvol_series_write_csv(const spotvol_series* series, const char* file,
                                        const spotvol_path* truth) {
  if (auto bad = require(series && file, "series_write_csv: NULL argument")) return bad;
  return guard([&] {
    spotvol::write_series_csv(series->impl, file, truth ? &truth->impl : nullptr);
  });
}

spotvol_status spotvol_integrated_pvar(const spotvol_path* path, double p, double t,
                                       double* out) {
  if (auto bad = require(path && out, "integrated_pvar: NULL argument")) return bad;
  return guard([&] { *out = spotvol::integrated_pvar_oracle(path->impl, p, t); });
}

spotvol_status spotvol_phi1(double p, double sigma, double* out) {
  if (auto bad = require(out != nullptr, "phi1: out is NULL")) return bad;
  return guard([&] { *out = spotvol::phi1(p, sigma); });
}

spotvol_status spotvol_phi2(double p, double sigma, double eta_sq, double* out) {
  if (auto bad = require(out != nullptr, "phi2: out is NULL")) return bad;
  return guard([&] { *out = spotvol::phi2(p, sigma, eta_sq); });
}

spotvol_status spotvol_confidence_interval(double estimate,
                                           const spotvol_estimator_config* config,
                                           double level, spotvol_interval* out) {
  if (auto bad = require(config && out, "confidence_interval: NULL argument")) return bad;
  return guard([&] {
    const auto ci = spotvol::confidence_interval(estimate, to_core(*config), level);
    *out = {ci.lo, ci.hi, ci.lo_sigma, ci.hi_sigma, ci.level};
  });
}

spotvol_status spotvol_relative_error_band(const spotvol_estimator_config* config,
                                           double level, double* out) {
  if (auto bad = require(config && out, "relative_error_band: NULL argument")) return bad;
  return guard([&] { *out = spotvol::relative_error_band(to_core(*config), level); });
}

spotvol_status spotvol_choose_window(uint64_t n, double rho, const double* jump_q,
                                     spotvol_window_choice* out) {
  if (auto bad = require(out != nullptr, "choose_window: out is NULL")) return bad;
  return guard([&] {
    const auto choice = spotvol::choose_window(
        n, rho, jump_q ? std::optional<double>(*jump_q) : std::nullopt);
    *out = {choice.h_n, choice.r_n, choice.rate_exponent};
  });
}

spotvol_status spotvol_classify_regime(double delta_n, double h_n, const double* jump_q,
                                       spotvol_regime* out) {
  if (auto bad = require(out != nullptr, "classify_regime: out is NULL")) return bad;
  return guard([&] {
    const auto regime = spotvol::classify_regime(
        delta_n, h_n, jump_q ? std::optional<double>(*jump_q) : std::nullopt);
    spotvol_regime_tag tag = SPOTVOL_REGIME_FAST_WINDOW;
    if (regime.tag == spotvol::RegimeTag::Balanced) tag = SPOTVOL_REGIME_BALANCED;
    if (regime.tag == spotvol::RegimeTag::JumpFiniteVariation)
      tag = SPOTVOL_REGIME_JUMP_FINITE_VARIATION;
    *out = {tag, regime.beta_limit, regime.rate_factor};
  });
}

spotvol_status spotvol_run_experiment(const spotvol_plan* plan,
                                      spotvol_experiment_mode mode, spotvol_report** out) {
  if (auto bad = require(plan && out, "run_experiment: NULL argument")) return bad;
  return guard([&] {
    const auto core_plan = to_core(*plan);
    auto handle = std::make_unique<spotvol_report>();
    switch (mode) {
      case SPOTVOL_EXPERIMENT_ERROR_TABLE:
        handle->impl = spotvol::run_error_table(core_plan);
        break;
      case SPOTVOL_EXPERIMENT_COVERAGE:
        handle->impl = spotvol::coverage_experiment(core_plan);
        break;
      case SPOTVOL_EXPERIMENT_RATE_FIT:
        handle->impl = spotvol::rate_fit(core_plan);
        break;
      default:
        throw std::invalid_argument("unknown experiment mode");
    }
    *out = handle.release();
  });
}

void spotvol_report_free(spotvol_report* report) { delete report; }

size_t spotvol_report_size(const spotvol_report* report) {
  return report ? report->impl.cells.size() : 0;
}

spotvol_status spotvol_report_cell_at(const spotvol_report* report, size_t index,
                                      spotvol_report_cell* out) {
  if (auto bad = require(report && out, "report_cell_at: NULL argument")) return bad;
  return guard([&] {
    const auto& cell = report->impl.cells.at(index);
    *out = {cell.p,
            cell.n,
            cell.rho,
            cell.h_n,
            cell.r_n,
            cell.n_paths,
            cell.mean_e,
            cell.se_e,
            cell.coverage,
            cell.se_cov,
            cell.fitted_rate,
            cell.predicted_rate,
            cell.clamp_frac,
            cell.stud_mean,
            cell.stud_var,
            cell.ks_dist,
            cell.beyond_domain_points,
            cell.zero_sigma_points};
  });
}

const char* spotvol_report_cell_warning(const spotvol_report* report, size_t index) {
  if (!report || index >= report->impl.cells.size()) return "";
  return report->impl.cells[index].regime_warning.c_str();
}

spotvol_status spotvol_report_best_rho(const spotvol_report* report, double p, uint64_t n,
                                       double* out) {
  if (auto bad = require(report && out, "report_best_rho: NULL argument")) return bad;
  return guard([&] { *out = report->impl.best_rho_for(p, n); });
}

spotvol_status spotvol_report_write_csv(const spotvol_report* report, const char* file) {
  if (auto bad = require(report && file, "report_write_csv: NULL argument")) return bad;
  return guard([&] { report->impl.write_csv(file); });
}

spotvol_status spotvol_report_print(const spotvol_report* report) {
  if (auto bad = require(report != nullptr, "report_print: NULL argument")) return bad;
  return guard([&] { report->impl.print(std::cout); });
}

spotvol_status spotvol_mean_relative_error(const spotvol_path* truth,
                                           const spotvol_obs* obs,
                                           const spotvol_estimator_config* config,
                                           double* out) {
  if (auto bad = require(truth && obs && config && out, "mean_relative_error: NULL argument"))
    return bad;
  return guard(
      [&] { *out = spotvol::mean_relative_error(truth->impl, obs->impl, to_core(*config)); });
}

}  // extern "C"
