#include "core/sampling.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <stdexcept>

namespace spotvol {

void TemperedStableParams::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("tempered stable: lambda must be > 0");
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("tempered stable: beta must lie in (0,1)");
  if (!(cutoff_eps > 0.0 && cutoff_eps <= 1.0))
    throw std::invalid_argument("tempered stable: cutoff_eps must lie in (0,1]");
}

double ts_tail_intensity(const TemperedStableParams& params) {
  params.validate();
  const double x = params.lambda * params.cutoff_eps;
  // Gamma(-beta, x) from the positive-order tail via the recurrence
  // Gamma(s+1, x) = s Gamma(s, x) + x^s e^{-x}.
  const double upper = (std::pow(x, -params.beta) * std::exp(-x) -
                        boost::math::tgamma(1.0 - params.beta, x)) /
                       params.beta;
  return std::pow(params.lambda, params.beta) * upper;
}

double ts_small_jump_mean(const TemperedStableParams& params) {
  params.validate();
  const double x = params.lambda * params.cutoff_eps;
  return std::pow(params.lambda, params.beta - 1.0) *
         boost::math::tgamma_lower(1.0 - params.beta, x);
}

double ts_mean_rate(const TemperedStableParams& params) {
  params.validate();
  return std::tgamma(1.0 - params.beta) * std::pow(params.lambda, params.beta - 1.0);
}

double ig_increment(RngStream& rng, double dt, double lambda) {
  if (!(dt > 0.0)) throw std::invalid_argument("ig_increment: dt must be > 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("ig_increment: lambda must be > 0");
  // Increment law of the subordinator with Levy density e^{-lambda y} y^{-3/2}:
  // inverse Gaussian with mean dt*sqrt(pi/lambda) and shape 2*pi*dt^2.
  const double mean = dt * std::sqrt(M_PI / lambda);
  const double shape = 2.0 * M_PI * dt * dt;
  const double gauss = rng.next_normal();
  const double w = mean * gauss * gauss;
  double root;
  if (w > 0.0) {
    const double s = std::sqrt(w * (w + 4.0 * shape));
    root = mean * (s - w) / (s + w);
  } else {
    root = mean;
  }
  const double u = rng.next_u01();
  return (u * (mean + root) <= mean) ? root : mean * mean / root;
}

TemperedStableSampler::TemperedStableSampler(const TemperedStableParams& params, double dt)
    : lambda_(params.lambda), beta_(params.beta), eps_(params.cutoff_eps) {
  params.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("tempered stable sampler: dt must be > 0");
  if (eps_ >= 1.0)
    throw std::invalid_argument(
        "tempered stable sampler: cutoff_eps >= 1 is a degenerate configuration");
  poisson_mean_ = dt * ts_tail_intensity(params);
  compensation_ = dt * ts_small_jump_mean(params);
}

double TemperedStableSampler::draw_jump(RngStream& rng) const {
  // Pareto proposal y = eps * u^{-1/beta} on [eps, inf), thinned by the
  // tempering factor exp(-lambda (y - eps)).
  for (;;) {
    const double u = rng.next_u01_pos();
    const double y = eps_ * std::pow(u, -1.0 / beta_);
    if (rng.next_u01() <= std::exp(-lambda_ * (y - eps_))) return y;
  }
}

double TemperedStableSampler::sample(RngStream& rng) const {
  const std::uint64_t jumps = rng.next_poisson(poisson_mean_);
  double total = compensation_;
  for (std::uint64_t i = 0; i < jumps; ++i) total += draw_jump(rng);
  return total;
}

double sample_ig_increment(SeedSpec seed, double dt, const TemperedStableParams& params) {
  params.validate();
  if (params.beta != 0.5)
    throw std::invalid_argument(
        "sample_ig_increment: exact route requires beta = 1/2; use the generic sampler");
  RngStream rng(seed);
  return ig_increment(rng, dt, params.lambda);
}

double sample_ts_increment_generic(SeedSpec seed, double dt,
                                   const TemperedStableParams& params) {
  TemperedStableSampler sampler(params, dt);
  RngStream rng(seed);
  return sampler.sample(rng);
}

}  // namespace spotvol
