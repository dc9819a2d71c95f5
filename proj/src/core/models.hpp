#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "core/rng.hpp"
#include "core/sampling.hpp"

namespace spotvol {

// Log-price with constant volatility: dX = (r - sigma^2/2) dt + sigma dW.
struct ConstantVolParams {
  double sigma = 0.2;
  double r = 0.0;
  double x0 = 0.0;
};

// Ornstein-Uhlenbeck spot variance:
//   dv = a (m - v) dt + beta_vol (rho dW1 + sqrt(1-rho^2) dW2), clamped at 0,
//   dX = (r - v/2) dt + sqrt(v) dW1.
struct OuVolParams {
  double r = 0.05;
  double a = 1.0;
  double m = 0.05;
  double beta_vol = 0.05;
  double rho = 0.0;
  double x0 = 0.0;
  double v0 = 0.05;
};

// Levy-driven OU variance (Barndorff-Nielsen/Shephard type):
//   dv = -mu v dt + dZ with Z a tempered stable subordinator,
//   dX = (r - v/2) dt + sqrt(v) dW1, W1 independent of Z.
struct BnsJumpParams {
  double r = 0.05;
  double mu = 1.0;
  TemperedStableParams ts{};
  double x0 = 0.0;
  double v0 = 0.05;
};

struct ModelSpec {
  std::variant<ConstantVolParams, OuVolParams, BnsJumpParams> params;

  void validate() const;  // throws std::invalid_argument
  double initial_x() const;
  double initial_variance() const;
  // q such that the volatility's jump component has locally finite
  // q-variation; empty for models with no jump component.
  std::optional<double> jump_variation_order() const;
  const char* name() const;
};

// Log-price and spot variance sampled on the fine simulation grid.
struct Path {
  double dt_fine = 0.0;
  double t_end = 0.0;
  std::vector<double> x;
  std::vector<double> v;
  std::uint64_t clamped_steps = 0;

  std::size_t size() const { return x.size(); }
  double time_at(std::size_t k) const { return static_cast<double>(k) * dt_fine; }
  double clamp_fraction() const;
};

// Log-price at the observation times i * delta_n.
struct Observations {
  double delta_n = 0.0;
  std::vector<double> x;

  std::size_t size() const { return x.size(); }
  double last_time() const {
    return x.empty() ? 0.0 : static_cast<double>(x.size() - 1) * delta_n;
  }
};

// Euler-Maruyama on the fine grid with a fixed per-step draw order
// (price normal first, then the variance draws).
Path simulate(const ModelSpec& model, double t_end, double dt_fine, SeedSpec seed);

// Every stride-th fine point starting at index 0; delta_n must be an
// integer multiple of dt_fine (tolerance 1e-9 on the ratio).
Observations subsample(const Path& path, double delta_n);

// sqrt(v) at the fine-grid point nearest to t from below.
double true_sigma_at(const Path& path, double t);

// Streaming variant of simulate+subsample for Monte Carlo work: consumes the
// same draws and produces bit-identical observation values without storing
// the fine grid. Also accumulates A(p) = int_0^t_end v^{p/2} ds (left Riemann
// sum on the fine grid) for each requested power.
struct ObservedSimulation {
  double delta_n = 0.0;
  std::vector<double> x;  // log-price at observation times
  std::vector<double> v;  // spot variance at observation times
  std::uint64_t clamped_steps = 0;
  std::uint64_t fine_steps = 0;
  std::vector<double> integrated_pvar;  // matches pvar_powers order
};

ObservedSimulation simulate_observed(const ModelSpec& model, double t_end,
                                     double delta_n, std::uint32_t fine_factor,
                                     SeedSpec seed,
                                     std::span<const double> pvar_powers = {});

}  // namespace spotvol
