#pragma once

#include "core/rng.hpp"

namespace spotvol {

// Parameters of the tempered stable subordinator with Levy density
// exp(-lambda*y) / y^{1+beta} on y > 0.
struct TemperedStableParams {
  double lambda = 1.0;      // tempering rate, > 0
  double beta = 0.5;        // stability index, in (0,1)
  double cutoff_eps = 1e-4; // small-jump truncation for the generic sampler

  void validate() const;  // throws std::invalid_argument
};

// Levy-density integrals, used by the generic sampler and as test oracles.
double ts_tail_intensity(const TemperedStableParams& params);   // int_eps^inf pi(dy)
double ts_small_jump_mean(const TemperedStableParams& params);  // int_0^eps y pi(dy)
double ts_mean_rate(const TemperedStableParams& params);        // int_0^inf y pi(dy)

// One subordinator increment over dt for beta = 1/2, where the increment law
// is inverse Gaussian. Exact sampling via the Michael-Schucany-Haas transform.
double ig_increment(RngStream& rng, double dt, double lambda);

// Generic increment for any beta in (0,1): compound Poisson over jumps >= eps
// plus the deterministic mean of the truncated small jumps.
class TemperedStableSampler {
 public:
  TemperedStableSampler(const TemperedStableParams& params, double dt);

  double sample(RngStream& rng) const;
  double jump_mean_count() const { return poisson_mean_; }
  double compensation() const { return compensation_; }

 private:
  double draw_jump(RngStream& rng) const;

  double lambda_;
  double beta_;
  double eps_;
  double poisson_mean_;   // dt * tail intensity
  double compensation_;   // dt * small-jump mean
};

// Single-shot forms keyed by a SeedSpec (pure functions of their inputs).
double sample_ig_increment(SeedSpec seed, double dt, const TemperedStableParams& params);
double sample_ts_increment_generic(SeedSpec seed, double dt, const TemperedStableParams& params);

}  // namespace spotvol
