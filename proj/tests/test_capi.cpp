#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spotvol/spotvol.h"

namespace {

spotvol_model ou_model() {
  spotvol_model model{};
  model.tag = SPOTVOL_MODEL_OU_VOL;
  model.r = 0.05;
  model.a = 1.0;
  model.m = 0.05;
  model.beta_vol = 0.05;
  model.rho = 0.0;
  model.x0 = std::log(50.0);
  model.v0 = 0.05;
  return model;
}

spotvol_model constant_model(double sigma = 0.2) {
  spotvol_model model{};
  model.tag = SPOTVOL_MODEL_CONSTANT_VOL;
  model.sigma = sigma;
  model.r = 0.0;
  model.x0 = 0.0;
  return model;
}

std::filesystem::path temp_file(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / "spotvol_test_capi";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(spotvol_version()) == "0.1.0");
  CHECK(std::string(spotvol_status_name(SPOTVOL_OK)) == "ok");
  CHECK(std::string(spotvol_status_name(SPOTVOL_ERR_RANGE)) == "range");
}

TEST_CASE("failures set an error message, successes clear it") {
  spotvol_path* path = nullptr;
  spotvol_model bad = constant_model(-1.0);
  CHECK(spotvol_simulate(&bad, 1.0, 1e-3, {1, 0}, &path) == SPOTVOL_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(spotvol_last_error()) > 0);

  spotvol_model good = constant_model();
  REQUIRE(spotvol_simulate(&good, 1.0, 1e-3, {1, 0}, &path) == SPOTVOL_OK);
  CHECK(std::strlen(spotvol_last_error()) == 0);
  CHECK(spotvol_simulate(nullptr, 1.0, 1e-3, {1, 0}, &path) ==
        SPOTVOL_ERR_INVALID_ARGUMENT);
  spotvol_path_free(path);
}

TEST_CASE("sampling entry points") {
  std::vector<double> draws(1000);
  REQUIRE(spotvol_sample_normal({7, 3}, draws.size(), draws.data()) == SPOTVOL_OK);
  std::vector<double> again(1000);
  REQUIRE(spotvol_sample_normal({7, 3}, again.size(), again.data()) == SPOTVOL_OK);
  CHECK(draws == again);
  CHECK(spotvol_sample_normal({7, 3}, 10, nullptr) == SPOTVOL_ERR_INVALID_ARGUMENT);

  spotvol_ts_params ts{1.0, 0.5, 1e-4};
  double ig = 0.0, generic = 0.0;
  REQUIRE(spotvol_sample_ig_increment({7, 4}, 1.0, &ts, &ig) == SPOTVOL_OK);
  CHECK(ig >= 0.0);
  REQUIRE(spotvol_sample_ts_increment({7, 4}, 1.0, &ts, &generic) == SPOTVOL_OK);
  CHECK(generic >= 0.0);
  ts.beta = 0.7;
  CHECK(spotvol_sample_ig_increment({7, 4}, 1.0, &ts, &ig) ==
        SPOTVOL_ERR_INVALID_ARGUMENT);
}

TEST_CASE("simulate, subsample, estimate, report through the C surface") {
  const spotvol_model model = ou_model();
  spotvol_path* path = nullptr;
  REQUIRE(spotvol_simulate(&model, 1.0, 1e-5, {2024, 0}, &path) == SPOTVOL_OK);
  REQUIRE(path != nullptr);
  CHECK(spotvol_path_size(path) == 100001);
  CHECK(spotvol_path_dt_fine(path) == 1e-5);
  CHECK(spotvol_path_t_end(path) == 1.0);
  CHECK(spotvol_path_x(path)[0] == std::log(50.0));
  CHECK(spotvol_path_v(path)[0] == 0.05);
  CHECK(spotvol_path_clamp_fraction(path) >= 0.0);

  double sigma0 = 0.0;
  REQUIRE(spotvol_true_sigma_at(path, 0.0, &sigma0) == SPOTVOL_OK);
  CHECK(sigma0 == std::sqrt(0.05));
  CHECK(spotvol_true_sigma_at(path, 2.0, &sigma0) == SPOTVOL_ERR_RANGE);

  spotvol_obs* obs = nullptr;
  REQUIRE(spotvol_subsample(path, 1e-3, &obs) == SPOTVOL_OK);
  CHECK(spotvol_obs_size(obs) == 1001);
  CHECK(spotvol_obs_delta_n(obs) == 1e-3);
  CHECK(spotvol_subsample(path, 7e-4 * (1 + 1e-6), &obs) == SPOTVOL_ERR_INVALID_ARGUMENT);

  const spotvol_estimator_config cfg{2.0, 1e-3, std::pow(1000.0, -0.5)};
  double estimate = 0.0;
  REQUIRE(spotvol_sigma_p_estimate(obs, &cfg, 0.5, &estimate) == SPOTVOL_OK);
  CHECK(estimate > 0.0);
  CHECK(spotvol_sigma_p_estimate(obs, &cfg, 0.999, &estimate) == SPOTVOL_ERR_RANGE);

  spotvol_series* series = nullptr;
  REQUIRE(spotvol_estimate_series(obs, &cfg, nullptr, 0, 1, 0.95, &series) == SPOTVOL_OK);
  const size_t count = spotvol_series_size(series);
  REQUIRE(count > 0);
  const double* sigma_hat = spotvol_series_sigma_hat(series);
  const double* lo = spotvol_series_ci_lo(series);
  const double* hi = spotvol_series_ci_hi(series);
  REQUIRE(sigma_hat != nullptr);
  REQUIRE(lo != nullptr);
  REQUIRE(hi != nullptr);
  for (size_t i = 0; i < count; ++i) {
    CHECK(lo[i] <= sigma_hat[i]);
    CHECK(sigma_hat[i] <= hi[i]);
  }

  const auto series_file = temp_file("series.csv");
  REQUIRE(spotvol_series_write_csv(series, series_file.string().c_str(), path) ==
          SPOTVOL_OK);
  std::ifstream check(series_file);
  std::string header;
  std::getline(check, header);
  CHECK(header == "t,sigma_p_hat,sigma_hat,ci_lo,ci_hi,sigma_true,rel_err");

  double mre = 0.0;
  REQUIRE(spotvol_mean_relative_error(path, obs, &cfg, &mre) == SPOTVOL_OK);
  CHECK(mre > 0.0);
  CHECK(mre < 1.0);

  double a2 = 0.0;
  REQUIRE(spotvol_integrated_pvar(path, 2.0, 1.0, &a2) == SPOTVOL_OK);
  CHECK(a2 > 0.0);

  spotvol_series_free(series);
  spotvol_obs_free(obs);
  spotvol_path_free(path);
}

TEST_CASE("csv round trip through the C surface") {
  const spotvol_model model = constant_model();
  spotvol_path* path = nullptr;
  REQUIRE(spotvol_simulate(&model, 0.05, 1e-3, {5, 5}, &path) == SPOTVOL_OK);
  const auto path_file = temp_file("path.csv");
  REQUIRE(spotvol_path_write_csv(path, path_file.string().c_str()) == SPOTVOL_OK);

  spotvol_path* back = nullptr;
  REQUIRE(spotvol_path_read_csv(path_file.string().c_str(), &back) == SPOTVOL_OK);
  REQUIRE(spotvol_path_size(back) == spotvol_path_size(path));
  CHECK(spotvol_path_x(back)[10] == spotvol_path_x(path)[10]);

  spotvol_obs* obs = nullptr;
  REQUIRE(spotvol_subsample(path, 5e-3, &obs) == SPOTVOL_OK);
  const auto obs_file = temp_file("obs.csv");
  REQUIRE(spotvol_obs_write_csv(obs, obs_file.string().c_str()) == SPOTVOL_OK);
  spotvol_obs* obs_back = nullptr;
  REQUIRE(spotvol_obs_read_csv(obs_file.string().c_str(), &obs_back) == SPOTVOL_OK);
  CHECK(spotvol_obs_size(obs_back) == spotvol_obs_size(obs));

  CHECK(spotvol_path_read_csv("/nonexistent/nope.csv", &back) == SPOTVOL_ERR_IO);

  spotvol_obs_free(obs_back);
  spotvol_obs_free(obs);
  spotvol_path_free(back);
  spotvol_path_free(path);
}

TEST_CASE("inference helpers through the C surface") {
  double value = 0.0;
  REQUIRE(spotvol_abs_moment(4.0, &value) == SPOTVOL_OK);
  CHECK(value == 3.0);
  CHECK(spotvol_abs_moment(-1.0, &value) == SPOTVOL_ERR_INVALID_ARGUMENT);
  CHECK(spotvol_p_theorem_backed(2.0) == 1);
  CHECK(spotvol_p_theorem_backed(2.5) == 0);
  CHECK(spotvol_p_theorem_backed(3.5) == 1);

  REQUIRE(spotvol_phi1(2.0, 1.0, &value) == SPOTVOL_OK);
  CHECK(value == doctest::Approx(2.0));
  REQUIRE(spotvol_phi2(2.0, 1.0, 3.0, &value) == SPOTVOL_OK);
  CHECK(value == doctest::Approx(4.0));

  const spotvol_estimator_config cfg{2.0, 1e-4, 1e-2};
  spotvol_interval ci{};
  REQUIRE(spotvol_confidence_interval(0.04, &cfg, 0.95, &ci) == SPOTVOL_OK);
  CHECK(ci.lo == doctest::Approx(0.03131898092).epsilon(1e-9));
  CHECK(ci.hi_sigma == doctest::Approx(0.2352421528).epsilon(1e-9));

  REQUIRE(spotvol_relative_error_band(&cfg, 0.95, &value) == SPOTVOL_OK);
  CHECK(value == doctest::Approx(0.2771807649).epsilon(1e-9));

  spotvol_window_choice window{};
  REQUIRE(spotvol_choose_window(10000, 0.5, nullptr, &window) == SPOTVOL_OK);
  CHECK(window.h_n == doctest::Approx(0.01));
  const double q = 1.0;
  REQUIRE(spotvol_choose_window(10000, 2.0 / 3.0, &q, &window) == SPOTVOL_OK);
  CHECK(window.rate_exponent == doctest::Approx(1.0 / 3.0));

  spotvol_regime regime{};
  REQUIRE(spotvol_classify_regime(1e-4, 4e-3, nullptr, &regime) == SPOTVOL_OK);
  CHECK(regime.tag == SPOTVOL_REGIME_FAST_WINDOW);
  REQUIRE(spotvol_classify_regime(1e-4, 4e-2, nullptr, &regime) == SPOTVOL_OK);
  CHECK(regime.tag == SPOTVOL_REGIME_BALANCED);
}

TEST_CASE("experiments through the C surface") {
  const uint64_t n_values[] = {256};
  const double rho_values[] = {0.4, 0.5};
  const double p_values[] = {2.0};
  spotvol_plan plan{};
  plan.model = constant_model();
  plan.n_values = n_values;
  plan.n_value_count = 1;
  plan.rho_values = rho_values;
  plan.rho_value_count = 2;
  plan.p_values = p_values;
  plan.p_value_count = 1;
  plan.n_paths = 6;
  plan.seed = {99, 0};
  plan.t_probe = 0.5;
  plan.level = 0.95;
  plan.fine_factor = 1;
  plan.threads = 2;

  spotvol_report* report = nullptr;
  REQUIRE(spotvol_run_experiment(&plan, SPOTVOL_EXPERIMENT_ERROR_TABLE, &report) ==
          SPOTVOL_OK);
  REQUIRE(spotvol_report_size(report) == 2);
  spotvol_report_cell cell{};
  REQUIRE(spotvol_report_cell_at(report, 0, &cell) == SPOTVOL_OK);
  CHECK(cell.p == 2.0);
  CHECK(cell.n == 256);
  CHECK(cell.mean_e > 0.0);
  CHECK(std::isnan(cell.coverage));
  CHECK(std::string(spotvol_report_cell_warning(report, 0)).size() >= 0);
  double best = 0.0;
  REQUIRE(spotvol_report_best_rho(report, 2.0, 256, &best) == SPOTVOL_OK);
  CHECK((best == 0.4 || best == 0.5));
  CHECK(spotvol_report_best_rho(report, 4.0, 256, &best) == SPOTVOL_ERR_RANGE);

  const auto report_file = temp_file("report.csv");
  REQUIRE(spotvol_report_write_csv(report, report_file.string().c_str()) == SPOTVOL_OK);
  std::ifstream in(report_file);
  std::string header;
  std::getline(in, header);
  CHECK(header == "p,n,rho,mean_E,se_E,coverage,se_cov,fitted_rate,clamp_frac");
  spotvol_report_free(report);

  CHECK(spotvol_run_experiment(nullptr, SPOTVOL_EXPERIMENT_ERROR_TABLE, &report) ==
        SPOTVOL_ERR_INVALID_ARGUMENT);
  plan.n_value_count = 0;
  CHECK(spotvol_run_experiment(&plan, SPOTVOL_EXPERIMENT_ERROR_TABLE, &report) ==
        SPOTVOL_ERR_INVALID_ARGUMENT);
}

TEST_CASE("obs_create validates input") {
  const double xs[] = {0.0, 0.1, 0.2, 0.25};
  spotvol_obs* obs = nullptr;
  REQUIRE(spotvol_obs_create(0.5, xs, 4, &obs) == SPOTVOL_OK);
  double pv = 0.0;
  REQUIRE(spotvol_power_variation(obs, 2.0, 1.5, &pv) == SPOTVOL_OK);
  CHECK(pv == doctest::Approx(0.01 + 0.01 + 0.0025));
  spotvol_obs_free(obs);
  CHECK(spotvol_obs_create(0.0, xs, 4, &obs) == SPOTVOL_ERR_INVALID_ARGUMENT);
  CHECK(spotvol_obs_create(0.5, nullptr, 4, &obs) == SPOTVOL_ERR_INVALID_ARGUMENT);
  CHECK(spotvol_obs_create(0.5, xs, 1, &obs) == SPOTVOL_ERR_INVALID_ARGUMENT);
}
