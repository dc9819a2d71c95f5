/* spotvol: instantaneous-volatility estimation from high-frequency
 * log-price observations.
 *
 * C interface of the shared library. All functions that can fail return a
 * spotvol_status; SPOTVOL_OK means success and any output parameters were
 * written. On failure spotvol_last_error() returns a thread-local message
 * describing the most recent error on the calling thread.
 *
 * Objects returned through spotvol_*_t** out-parameters are owned by the
 * caller and must be released with the matching *_free function. Pointers
 * returned by accessors stay valid until the owning object is freed.
 */
#ifndef SPOTVOL_H
#define SPOTVOL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* ------------------------------------------------------------------ */
/* status and diagnostics                                             */

typedef enum spotvol_status {
  SPOTVOL_OK = 0,
  SPOTVOL_ERR_INVALID_ARGUMENT = 1,
  SPOTVOL_ERR_RANGE = 2,
  SPOTVOL_ERR_IO = 3,
  SPOTVOL_ERR_INTERNAL = 4
} spotvol_status;

const char* spotvol_version(void);
const char* spotvol_status_name(spotvol_status status);
/* Message for the last failing call on this thread ("" if none). */
const char* spotvol_last_error(void);

/* ------------------------------------------------------------------ */
/* random sampling                                                    */

typedef struct spotvol_seed {
  uint64_t master_seed;
  uint64_t stream_id; /* one stream per Monte Carlo path/worker */
} spotvol_seed;

/* Tempered stable subordinator: Levy density exp(-lambda y)/y^{1+beta}. */
typedef struct spotvol_ts_params {
  double lambda;     /* tempering rate, > 0 */
  double beta;       /* stability index, in (0,1) */
  double cutoff_eps; /* small-jump truncation, in (0,1); generic path only */
} spotvol_ts_params;

/* count i.i.d. standard normal draws into out[0..count-1]. */
spotvol_status spotvol_sample_normal(spotvol_seed seed, size_t count, double* out);

/* Exact increment over dt for beta = 1/2 (inverse Gaussian law). */
spotvol_status spotvol_sample_ig_increment(spotvol_seed seed, double dt,
                                           const spotvol_ts_params* params,
                                           double* out);

/* Compensated compound-Poisson increment for any beta in (0,1). */
spotvol_status spotvol_sample_ts_increment(spotvol_seed seed, double dt,
                                           const spotvol_ts_params* params,
                                           double* out);

/* ------------------------------------------------------------------ */
/* models and paths                                                   */

typedef enum spotvol_model_tag {
  SPOTVOL_MODEL_CONSTANT_VOL = 0,
  SPOTVOL_MODEL_OU_VOL = 1,
  SPOTVOL_MODEL_BNS_JUMP = 2
} spotvol_model_tag;

/* Tagged union of model parameters; only the fields of the tagged model
 * are read. r is the price drift rate, x0 the initial log-price, v0 the
 * initial spot variance. */
typedef struct spotvol_model {
  spotvol_model_tag tag;
  double r;
  double x0;
  double v0;
  /* constant-vol */
  double sigma;
  /* OU spot variance: dv = a(m - v)dt + beta_vol(rho dW1 + sqrt(1-rho^2)dW2) */
  double a;
  double m;
  double beta_vol;
  double rho;
  /* BNS jump variance: dv = -mu v dt + dZ */
  double mu;
  spotvol_ts_params ts;
} spotvol_model;

typedef struct spotvol_path spotvol_path;
typedef struct spotvol_obs spotvol_obs;

/* Euler-Maruyama simulation on the fine grid of step dt_fine. */
spotvol_status spotvol_simulate(const spotvol_model* model, double t_end,
                                double dt_fine, spotvol_seed seed,
                                spotvol_path** out);
void spotvol_path_free(spotvol_path* path);

size_t spotvol_path_size(const spotvol_path* path);
double spotvol_path_dt_fine(const spotvol_path* path);
double spotvol_path_t_end(const spotvol_path* path);
const double* spotvol_path_x(const spotvol_path* path); /* len = size */
const double* spotvol_path_v(const spotvol_path* path); /* len = size */
double spotvol_path_clamp_fraction(const spotvol_path* path);

/* sqrt(v) at the fine-grid point nearest to t from below. */
spotvol_status spotvol_true_sigma_at(const spotvol_path* path, double t, double* out);

/* Every k-th fine point; delta_n must be an integer multiple of dt_fine. */
spotvol_status spotvol_subsample(const spotvol_path* path, double delta_n,
                                 spotvol_obs** out);

/* Observations from caller-provided log-prices at times i*delta_n. */
spotvol_status spotvol_obs_create(double delta_n, const double* x, size_t count,
                                  spotvol_obs** out);
void spotvol_obs_free(spotvol_obs* obs);

size_t spotvol_obs_size(const spotvol_obs* obs);
double spotvol_obs_delta_n(const spotvol_obs* obs);
const double* spotvol_obs_x(const spotvol_obs* obs);

/* CSV, 17 significant digits, LF line endings. Headers: t,x,v and t,x. */
spotvol_status spotvol_path_write_csv(const spotvol_path* path, const char* file);
spotvol_status spotvol_path_read_csv(const char* file, spotvol_path** out);
spotvol_status spotvol_obs_write_csv(const spotvol_obs* obs, const char* file);
spotvol_status spotvol_obs_read_csv(const char* file, spotvol_obs** out);

/* ------------------------------------------------------------------ */
/* estimator                                                          */

typedef struct spotvol_estimator_config {
  double p;       /* power order, >= 1 */
  double delta_n; /* observation step */
  double h_n;     /* window length, > delta_n */
} spotvol_estimator_config;

/* p-th absolute moment of a standard normal. */
spotvol_status spotvol_abs_moment(double p, double* out);

/* 1 when the CLT backs this order (p = 2 or p >= 3), else 0 (LLN only). */
int spotvol_p_theorem_backed(double p);

/* Power variation of order p up to time t. */
spotvol_status spotvol_power_variation(const spotvol_obs* obs, double p, double t,
                                       double* out);

/* Windowed estimate of sigma_t^p. */
spotvol_status spotvol_sigma_p_estimate(const spotvol_obs* obs,
                                        const spotvol_estimator_config* config,
                                        double t, double* out);

typedef struct spotvol_series spotvol_series;

/* Estimates on the given grid (grid == NULL: observation times within
 * [h_n, T - h_n]). with_ci != 0 attaches sigma-scale confidence bounds at
 * the given level. */
spotvol_status spotvol_estimate_series(const spotvol_obs* obs,
                                       const spotvol_estimator_config* config,
                                       const double* grid, size_t grid_len,
                                       int with_ci, double level,
                                       spotvol_series** out);
void spotvol_series_free(spotvol_series* series);

size_t spotvol_series_size(const spotvol_series* series);
const double* spotvol_series_times(const spotvol_series* series);
const double* spotvol_series_sigma_p_hat(const spotvol_series* series);
const double* spotvol_series_sigma_hat(const spotvol_series* series);
/* NULL when no interval was attached. */
const double* spotvol_series_ci_lo(const spotvol_series* series);
const double* spotvol_series_ci_hi(const spotvol_series* series);

/* Header t,sigma_p_hat,sigma_hat,ci_lo,ci_hi; appends sigma_true,rel_err
 * when truth is non-NULL. */
spotvol_status spotvol_series_write_csv(const spotvol_series* series, const char* file,
                                        const spotvol_path* truth);

/* A(p)_t = int_0^t sigma_s^p ds (left Riemann sum on the fine grid). */
spotvol_status spotvol_integrated_pvar(const spotvol_path* path, double p, double t,
                                       double* out);

/* ------------------------------------------------------------------ */
/* inference                                                          */

/* (m_2p - m_p^2)/m_p^2 * sigma^{2p}. */
spotvol_status spotvol_phi1(double p, double sigma, double* out);
/* (p^2/3) * sigma^{2p-2} * eta_sq. */
spotvol_status spotvol_phi2(double p, double sigma, double eta_sq, double* out);

typedef struct spotvol_interval {
  double lo; /* sigma^p scale */
  double hi;
  double lo_sigma; /* p-th roots */
  double hi_sigma;
  double level;
} spotvol_interval;

spotvol_status spotvol_confidence_interval(double estimate,
                                           const spotvol_estimator_config* config,
                                           double level, spotvol_interval* out);

/* z(level) sqrt(m_2p - m_p^2) / (m_p sqrt(r_n)). */
spotvol_status spotvol_relative_error_band(const spotvol_estimator_config* config,
                                           double level, double* out);

typedef struct spotvol_window_choice {
  double h_n;           /* n^{rho-1} */
  double r_n;           /* n^rho */
  double rate_exponent; /* predicted error decay n^{-rate_exponent} */
} spotvol_window_choice;

/* jump_q: NULL for Brownian volatility, else the jump-variation order in
 * [1,2]. */
spotvol_status spotvol_choose_window(uint64_t n, double rho, const double* jump_q,
                                     spotvol_window_choice* out);

typedef enum spotvol_regime_tag {
  SPOTVOL_REGIME_FAST_WINDOW = 0,
  SPOTVOL_REGIME_BALANCED = 1,
  SPOTVOL_REGIME_JUMP_FINITE_VARIATION = 2
} spotvol_regime_tag;

typedef struct spotvol_regime {
  spotvol_regime_tag tag;
  double beta_limit;  /* meaningful for BALANCED only */
  double rate_factor; /* sqrt(h_n/delta_n) or 1/sqrt(h_n) */
} spotvol_regime;

spotvol_status spotvol_classify_regime(double delta_n, double h_n,
                                       const double* jump_q, spotvol_regime* out);

/* ------------------------------------------------------------------ */
/* Monte Carlo experiments                                            */

typedef enum spotvol_experiment_mode {
  SPOTVOL_EXPERIMENT_ERROR_TABLE = 0,
  SPOTVOL_EXPERIMENT_COVERAGE = 1,
  SPOTVOL_EXPERIMENT_RATE_FIT = 2
} spotvol_experiment_mode;

/* Grid plan: observation step 1/n on the unit horizon, window n^{rho-1},
 * fine simulation step delta_n / fine_factor. */
typedef struct spotvol_plan {
  spotvol_model model;
  const uint64_t* n_values;
  size_t n_value_count;
  const double* rho_values;
  size_t rho_value_count;
  const double* p_values;
  size_t p_value_count;
  uint32_t n_paths;
  spotvol_seed seed;
  double t_probe;
  double level;
  uint32_t fine_factor;
  uint32_t threads; /* 0 = hardware concurrency */
} spotvol_plan;

typedef struct spotvol_report spotvol_report;

spotvol_status spotvol_run_experiment(const spotvol_plan* plan,
                                      spotvol_experiment_mode mode,
                                      spotvol_report** out);
void spotvol_report_free(spotvol_report* report);

typedef struct spotvol_report_cell {
  double p;
  uint64_t n;
  double rho;
  double h_n;
  double r_n;
  uint32_t n_paths;
  /* NaN marks a field the mode does not fill. */
  double mean_e;
  double se_e;
  double coverage;
  double se_cov;
  double fitted_rate;
  double predicted_rate;
  double clamp_frac;
  double stud_mean;
  double stud_var;
  double ks_dist;
  uint64_t beyond_domain_points;
  uint64_t zero_sigma_points;
} spotvol_report_cell;

size_t spotvol_report_size(const spotvol_report* report);
spotvol_status spotvol_report_cell_at(const spotvol_report* report, size_t index,
                                      spotvol_report_cell* out);
/* Regime warning for a cell ("" when the regime matches the theory). */
const char* spotvol_report_cell_warning(const spotvol_report* report, size_t index);
/* rho minimizing the mean error for (p, n); error-table reports only. */
spotvol_status spotvol_report_best_rho(const spotvol_report* report, double p,
                                       uint64_t n, double* out);

/* Header p,n,rho,mean_E,se_E,coverage,se_cov,fitted_rate,clamp_frac. */
spotvol_status spotvol_report_write_csv(const spotvol_report* report, const char* file);
/* Pretty table to stdout. */
spotvol_status spotvol_report_print(const spotvol_report* report);

/* Mean relative error of the estimate series against the simulated truth. */
spotvol_status spotvol_mean_relative_error(const spotvol_path* truth,
                                           const spotvol_obs* obs,
                                           const spotvol_estimator_config* config,
                                           double* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SPOTVOL_H */
