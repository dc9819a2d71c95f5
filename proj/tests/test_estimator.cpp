#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "core/estimator.hpp"
#include "core/models.hpp"
#include "core/rng.hpp"
#include "core/stats.hpp"

using namespace spotvol;

namespace {

Observations obs_from_increments(const std::vector<double>& increments, double delta_n) {
  Observations obs;
  obs.delta_n = delta_n;
  obs.x.push_back(0.0);
  for (double inc : increments) obs.x.push_back(obs.x.back() + inc);
  return obs;
}

}  // namespace

TEST_CASE("abs_moment closed forms") {
  // independently computed: quadrature of |u|^p phi(u)
  CHECK(abs_moment(1.0) == doctest::Approx(0.797884560802865).epsilon(1e-13));
  CHECK(abs_moment(2.0) == 1.0);
  CHECK(abs_moment(3.0) == doctest::Approx(1.59576912160573).epsilon(1e-13));
  CHECK(abs_moment(4.0) == 3.0);
  CHECK(abs_moment(6.0) == 15.0);
  CHECK(abs_moment(8.0) == 105.0);
  CHECK_THROWS_AS(abs_moment(-1.0), std::invalid_argument);
}

TEST_CASE("abs_moment satisfies the gaussian recursion m_{p+2} = (p+1) m_p") {
  for (double p : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.7, 4.0, 5.25, 6.0}) {
    CHECK(abs_moment(p + 2.0) ==
          doctest::Approx((p + 1.0) * abs_moment(p)).epsilon(1e-12));
  }
}

TEST_CASE("power variation of a worked example") {
  const auto obs = obs_from_increments({1.0, -2.0, 3.0}, 1.0);
  CHECK(power_variation(obs, 2.0, 3.0) == 14.0);
  CHECK(power_variation(obs, 2.0, 2.0) == 5.0);
  CHECK(power_variation(obs, 2.0, 0.5) == 0.0);  // empty sum below delta_n
  CHECK(power_variation(obs, 1.0, 3.0) == 6.0);
  CHECK_THROWS_AS(power_variation(obs, 2.0, 3.5), std::out_of_range);
  CHECK_THROWS_AS(power_variation(obs, 2.0, -1.0), std::out_of_range);
}

TEST_CASE("power variation is homogeneous of degree p") {
  RngStream rng({64, 0});
  std::vector<double> incs(40);
  for (auto& v : incs) v = rng.next_normal();
  const auto obs = obs_from_increments(incs, 0.25);
  auto scaled = obs;
  for (auto& x : scaled.x) x *= 2.0;
  for (double p : {1.0, 2.0, 3.0, 4.0}) {
    CHECK(power_variation(scaled, p, 10.0) ==
          std::pow(2.0, p) * power_variation(obs, p, 10.0));
  }
}

TEST_CASE("power variation is additive over grid-aligned split points") {
  RngStream rng({65, 0});
  std::vector<double> incs(50);
  for (auto& v : incs) v = rng.next_normal();
  const auto obs = obs_from_increments(incs, 0.1);
  const double t = 5.0, s = 2.0;
  double window = 0.0;
  for (std::size_t i = 21; i <= 50; ++i)
    window += std::pow(std::abs(obs.x[i] - obs.x[i - 1]), 2.0);
  CHECK(power_variation(obs, 2.0, t) ==
        doctest::Approx(power_variation(obs, 2.0, s) + window).epsilon(1e-12));
}

TEST_CASE("windowed estimate of equal increments reduces to c^p / m_p") {
  const double delta = 0.01, c = 1.7;
  std::vector<double> incs(100, c * std::sqrt(delta));
  const auto obs = obs_from_increments(incs, delta);
  const EstimatorConfig cfg{2.0, delta, 0.05};
  const double estimate = sigma_p_estimate(obs, cfg, 0.1);
  CHECK(estimate == doctest::Approx(c * c / abs_moment(2.0)).epsilon(1e-12));
  const EstimatorConfig cfg4{4.0, delta, 0.05};
  CHECK(sigma_p_estimate(obs, cfg4, 0.1) ==
        doctest::Approx(std::pow(c, 4.0) / abs_moment(4.0)).epsilon(1e-12));
}

TEST_CASE("windowed estimate of a flat path is zero") {
  std::vector<double> incs(50, 0.0);
  const auto obs = obs_from_increments(incs, 0.01);
  const EstimatorConfig cfg{2.0, 0.01, 0.05};
  CHECK(sigma_p_estimate(obs, cfg, 0.2) == 0.0);
}

TEST_CASE("windowed estimate rejects t beyond T - h_n") {
  std::vector<double> incs(50, 0.1);
  const auto obs = obs_from_increments(incs, 0.01);
  const EstimatorConfig cfg{2.0, 0.01, 0.05};
  CHECK_NOTHROW(sigma_p_estimate(obs, cfg, 0.45));
  CHECK_THROWS_AS(sigma_p_estimate(obs, cfg, 0.46), std::out_of_range);
  CHECK_THROWS_AS(sigma_p_estimate(obs, cfg, -0.01), std::out_of_range);
}

TEST_CASE("estimator config validation") {
  CHECK_THROWS_AS((EstimatorConfig{0.5, 0.01, 0.05}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((EstimatorConfig{2.0, 0.0, 0.05}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((EstimatorConfig{2.0, 0.01, 0.01}).validate(), std::invalid_argument);
  CHECK((EstimatorConfig{2.0, 0.01, 0.05}).theorem_backed());
  CHECK((EstimatorConfig{3.5, 0.01, 0.05}).theorem_backed());
  CHECK_FALSE((EstimatorConfig{2.5, 0.01, 0.05}).theorem_backed());
  CHECK((EstimatorConfig{2.0, 0.01, 0.05}).window_ratio() == doctest::Approx(5.0));
}

TEST_CASE("window telescoping: estimate equals the direct loop over the index set") {
  RngStream rng({4096, 0});
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 5 + static_cast<std::size_t>(rng.next_u01() * 45);
    const double delta = 0.001 + rng.next_u01() * 0.2;
    std::vector<double> incs(n);
    for (auto& v : incs) v = rng.next_normal() * (0.01 + rng.next_u01());
    const auto obs = obs_from_increments(incs, delta);
    const double p = 1.0 + rng.next_u01() * 3.0;
    const double t_total = static_cast<double>(n) * delta;
    // keep t and t+h away from grid boundaries so the floor is unambiguous
    const double h =
        delta * (1.2 + rng.next_u01() * (static_cast<double>(n) / 2.0 - 1.0));
    const double max_start = t_total - h - delta;
    if (max_start <= 0.0) continue;
    const double t = (0.2 + 0.6 * rng.next_u01()) * max_start;
    const EstimatorConfig cfg{p, delta, h};

    // brute-force oracle: plain floors, explicit loop over the window set
    const auto lo = static_cast<std::size_t>(std::floor(t / delta));
    const auto hi = std::min<std::size_t>(
        static_cast<std::size_t>(std::floor((t + h) / delta)), n);
    double sum = 0.0;
    for (std::size_t i = lo + 1; i <= hi; ++i)
      sum += std::pow(std::abs(obs.x[i] - obs.x[i - 1]), p);
    const double oracle =
        std::pow(delta, 1.0 - 0.5 * p) * sum / (abs_moment(p) * h);

    const double estimate = sigma_p_estimate(obs, cfg, t);
    if (oracle == 0.0)
      CHECK(estimate == 0.0);
    else
      CHECK(std::abs(estimate - oracle) / oracle <= 1e-12);
  }
}

TEST_CASE("series evaluation matches pointwise calls and scales exactly") {
  RngStream rng({2222, 0});
  std::vector<double> incs(200);
  for (auto& v : incs) v = 0.02 * rng.next_normal();
  auto obs = obs_from_increments(incs, 0.005);
  const EstimatorConfig cfg{2.0, 0.005, 0.05};

  const double grid_point[] = {0.4};
  const auto single = estimate_series(obs, cfg, grid_point);
  REQUIRE(single.size() == 1);
  CHECK(single.sigma_p_hat[0] == sigma_p_estimate(obs, cfg, 0.4));
  CHECK(single.sigma_hat[0] == std::pow(single.sigma_p_hat[0], 0.5));

  const auto grid = default_grid(obs, cfg);
  REQUIRE(!grid.empty());
  CHECK(grid.front() == doctest::Approx(cfg.h_n));
  CHECK(grid.back() <= obs.last_time() - cfg.h_n + 1e-9);
  const auto series = estimate_series(obs, cfg, grid);

  auto scaled = obs;
  for (auto& x : scaled.x) x *= 2.0;
  const auto series2 = estimate_series(scaled, cfg, grid);
  for (std::size_t i = 0; i < series.size(); ++i) {
    CHECK(series2.sigma_p_hat[i] == 4.0 * series.sigma_p_hat[i]);
    CHECK(series2.sigma_hat[i] ==
          doctest::Approx(2.0 * series.sigma_hat[i]).epsilon(1e-14));
  }
}

TEST_CASE("p = 2 and p = 4 estimate the same volatility path") {
  const ModelSpec model{ConstantVolParams{0.25, 0.0, 0.0}};
  const auto sim = simulate_observed(model, 1.0, 1e-3, 1, {5150, 0});
  Observations obs{1e-3, sim.x};
  const EstimatorConfig cfg2{2.0, 1e-3, 0.04};
  const EstimatorConfig cfg4{4.0, 1e-3, 0.04};
  const auto grid = default_grid(obs, cfg2);
  const auto s2 = estimate_series(obs, cfg2, grid);
  const auto s4 = estimate_series(obs, cfg4, grid);
  double diff = 0.0, scatter = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    diff += std::abs(s4.sigma_hat[i] - s2.sigma_hat[i]);
    scatter += std::abs(s2.sigma_hat[i] - 0.25);
  }
  diff /= static_cast<double>(grid.size());
  scatter /= static_cast<double>(grid.size());
  CHECK(diff < 3.0 * scatter);
}

TEST_CASE("integrated power variation oracle") {
  Path path;
  path.dt_fine = 0x1p-10;  // 1/1024, exactly representable
  path.t_end = 1.0;
  path.x.assign(1025, 0.0);
  path.v.assign(1025, 0.04);
  CHECK(integrated_pvar_oracle(path, 2.0, 1.0) == doctest::Approx(0.04).epsilon(1e-14));
  CHECK(integrated_pvar_oracle(path, 0.0, 1.0) == 1.0);
  CHECK(integrated_pvar_oracle(path, 2.0, 0.5) == doctest::Approx(0.02).epsilon(1e-12));
  CHECK_THROWS_AS(integrated_pvar_oracle(path, 2.0, 1.5), std::out_of_range);
}

TEST_CASE("law of large numbers: normalized power variation approaches m_p A(p)") {
  // constant volatility: A(p)_1 = sigma^p exactly
  {
    const ModelSpec model{ConstantVolParams{0.2, 0.0, 0.0}};
    const std::size_t n = 100000;
    const int n_paths = 100;
    for (double p : {2.0, 4.0}) {
      std::vector<double> residuals(n_paths);
      for (int j = 0; j < n_paths; ++j) {
        const auto sim =
            simulate_observed(model, 1.0, 1.0 / n, 1, {7171, static_cast<std::uint64_t>(j)});
        Observations obs{1.0 / n, sim.x};
        const double normalized =
            std::pow(1.0 / n, 1.0 - 0.5 * p) * power_variation(obs, p, 1.0);
        residuals[j] = normalized - abs_moment(p) * std::pow(0.2, p);
      }
      const SampleStats stats = summarize(residuals);
      CHECK(std::abs(stats.mean) < 3.0 * stats.std_error);
    }
  }
  // stochastic volatility: compare against the pathwise A(p) oracle
  {
    const ModelSpec model{OuVolParams{0.05, 1.0, 0.05, 0.05, 0.0, std::log(50.0), 0.05}};
    const std::size_t n = 10000;
    const int n_paths = 20;
    const double powers[] = {2.0};
    double total_rel = 0.0;
    for (int j = 0; j < n_paths; ++j) {
      const auto sim = simulate_observed(model, 1.0, 1.0 / n, 100,
                                         {7272, static_cast<std::uint64_t>(j)}, powers);
      Observations obs{1.0 / n, sim.x};
      const double normalized = power_variation(obs, 2.0, 1.0);
      const double target = abs_moment(2.0) * sim.integrated_pvar[0];
      total_rel += std::abs(normalized - target) / target;
    }
    CHECK(total_rel / n_paths < 0.05);
  }
}
