#include "core/models.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "core/special.hpp"
#include "core/stats.hpp"

namespace spotvol {

namespace {

constexpr double kIndexTol = 1e-9;

std::size_t step_count(double t_end, double dt) {
  if (!(t_end > 0.0)) throw std::invalid_argument("simulate: t_end must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("simulate: time step must be > 0");
  return static_cast<std::size_t>(std::floor(t_end / dt + kIndexTol));
}

// One-step Euler transition with a fixed draw order.
class Stepper {
 public:
  Stepper(const ModelSpec& model, double dt) : dt_(dt), sqrt_dt_(std::sqrt(dt)) {
    model.validate();
    x_ = model.initial_x();
    v_ = model.initial_variance();
    if (const auto* cv = std::get_if<ConstantVolParams>(&model.params)) {
      kind_ = Kind::Constant;
      drift_ = cv->r - 0.5 * cv->sigma * cv->sigma;
      sigma_ = cv->sigma;
    } else if (const auto* ou = std::get_if<OuVolParams>(&model.params)) {
      kind_ = Kind::Ou;
      ou_ = *ou;
      rho_comp_ = std::sqrt(1.0 - ou->rho * ou->rho);
    } else {
      const auto& bns = std::get<BnsJumpParams>(model.params);
      kind_ = Kind::Bns;
      bns_ = bns;
      if (bns.mu * dt >= 1.0)
        throw std::invalid_argument(
            "simulate: mu * dt_fine >= 1 makes the explicit scheme unstable");
      if (bns.ts.beta != 0.5)
        ts_sampler_ = std::make_unique<TemperedStableSampler>(bns.ts, dt);
    }
  }

  void step(RngStream& rng) {
    switch (kind_) {
      case Kind::Constant:
        x_ += drift_ * dt_ + sigma_ * sqrt_dt_ * rng.next_normal();
        break;
      case Kind::Ou: {
        const double dw1 = rng.next_normal();
        const double dw2 = rng.next_normal();
        x_ += (ou_.r - 0.5 * v_) * dt_ + std::sqrt(v_) * sqrt_dt_ * dw1;
        v_ += ou_.a * (ou_.m - v_) * dt_ +
              ou_.beta_vol * sqrt_dt_ * (ou_.rho * dw1 + rho_comp_ * dw2);
        if (v_ < 0.0) {
          v_ = 0.0;
          ++clamped_;
        }
        break;
      }
      case Kind::Bns: {
        const double dw1 = rng.next_normal();
        const double dz = ts_sampler_ ? ts_sampler_->sample(rng)
                                      : ig_increment(rng, dt_, bns_.ts.lambda);
        x_ += (bns_.r - 0.5 * v_) * dt_ + std::sqrt(v_) * sqrt_dt_ * dw1;
        v_ += -bns_.mu * v_ * dt_ + dz;
        break;
      }
    }
  }

  double x() const { return x_; }
  double v() const { return v_; }
  std::uint64_t clamped() const { return clamped_; }

 private:
  enum class Kind { Constant, Ou, Bns };

  Kind kind_ = Kind::Constant;
  double dt_;
  double sqrt_dt_;
  double x_ = 0.0;
  double v_ = 0.0;
  std::uint64_t clamped_ = 0;
  double drift_ = 0.0;
  double sigma_ = 0.0;
  OuVolParams ou_{};
  BnsJumpParams bns_{};
  double rho_comp_ = 0.0;
  std::unique_ptr<TemperedStableSampler> ts_sampler_;
};

}  // namespace

void ModelSpec::validate() const {
  if (const auto* cv = std::get_if<ConstantVolParams>(&params)) {
    if (!(cv->sigma >= 0.0)) throw std::invalid_argument("constant-vol: sigma must be >= 0");
    return;
  }
  if (const auto* ou = std::get_if<OuVolParams>(&params)) {
    if (!(ou->a > 0.0)) throw std::invalid_argument("ou-vol: a must be > 0");
    if (!(ou->m > 0.0)) throw std::invalid_argument("ou-vol: m must be > 0");
    if (!(ou->beta_vol >= 0.0)) throw std::invalid_argument("ou-vol: beta_vol must be >= 0");
    if (!(ou->rho >= -1.0 && ou->rho <= 1.0))
      throw std::invalid_argument("ou-vol: rho must lie in [-1,1]");
    if (!(ou->v0 >= 0.0)) throw std::invalid_argument("ou-vol: v0 must be >= 0");
    return;
  }
  const auto& bns = std::get<BnsJumpParams>(params);
  if (!(bns.mu > 0.0)) throw std::invalid_argument("bns-jump: mu must be > 0");
  if (!(bns.v0 >= 0.0)) throw std::invalid_argument("bns-jump: v0 must be >= 0");
  bns.ts.validate();
}

double ModelSpec::initial_x() const {
  return std::visit([](const auto& p) { return p.x0; }, params);
}

double ModelSpec::initial_variance() const {
  if (const auto* cv = std::get_if<ConstantVolParams>(&params))
    return cv->sigma * cv->sigma;
  if (const auto* ou = std::get_if<OuVolParams>(&params)) return ou->v0;
  return std::get<BnsJumpParams>(params).v0;
}

std::optional<double> ModelSpec::jump_variation_order() const {
  if (std::holds_alternative<BnsJumpParams>(params)) return 1.0;
  return std::nullopt;
}

const char* ModelSpec::name() const {
  if (std::holds_alternative<ConstantVolParams>(params)) return "constant_vol";
  if (std::holds_alternative<OuVolParams>(params)) return "ou_vol";
  return "bns_jump";
}

double Path::clamp_fraction() const {
  const std::size_t steps = x.empty() ? 0 : x.size() - 1;
  return steps == 0 ? 0.0
                    : static_cast<double>(clamped_steps) / static_cast<double>(steps);
}

Path simulate(const ModelSpec& model, double t_end, double dt_fine, SeedSpec seed) {
  const std::size_t steps = step_count(t_end, dt_fine);
  Stepper stepper(model, dt_fine);
  RngStream rng(seed);

  Path path;
  path.dt_fine = dt_fine;
  path.t_end = t_end;
  path.x.reserve(steps + 1);
  path.v.reserve(steps + 1);
  path.x.push_back(stepper.x());
  path.v.push_back(stepper.v());
  for (std::size_t k = 0; k < steps; ++k) {
    stepper.step(rng);
    path.x.push_back(stepper.x());
    path.v.push_back(stepper.v());
  }
  path.clamped_steps = stepper.clamped();
  return path;
}

Observations subsample(const Path& path, double delta_n) {
  if (path.x.empty()) throw std::invalid_argument("subsample: empty path");
  if (!(delta_n > 0.0)) throw std::invalid_argument("subsample: delta_n must be > 0");
  const double ratio = delta_n / path.dt_fine;
  const double rounded = std::round(ratio);
  if (!(rounded >= 1.0) || std::abs(ratio - rounded) > kIndexTol)
    throw std::invalid_argument(
        "subsample: delta_n must be an integer multiple of the path's dt_fine");
  const auto stride = static_cast<std::size_t>(rounded);

  Observations obs;
  obs.delta_n = delta_n;
  obs.x.reserve(path.x.size() / stride + 1);
  for (std::size_t i = 0; i < path.x.size(); i += stride) obs.x.push_back(path.x[i]);
  return obs;
}

double true_sigma_at(const Path& path, double t) {
  if (path.v.empty()) throw std::invalid_argument("true_sigma_at: empty path");
  if (t < -kIndexTol || t > path.t_end + kIndexTol)
    throw std::out_of_range("true_sigma_at: t outside [0, t_end]");
  auto idx = static_cast<std::size_t>(std::floor(std::max(t, 0.0) / path.dt_fine + kIndexTol));
  if (idx >= path.v.size()) idx = path.v.size() - 1;
  return std::sqrt(path.v[idx]);
}

ObservedSimulation simulate_observed(const ModelSpec& model, double t_end,
                                     double delta_n, std::uint32_t fine_factor,
                                     SeedSpec seed, std::span<const double> pvar_powers) {
  if (fine_factor == 0) throw std::invalid_argument("simulate_observed: fine_factor must be >= 1");
  if (!(delta_n > 0.0)) throw std::invalid_argument("simulate_observed: delta_n must be > 0");
  const double dt = delta_n / static_cast<double>(fine_factor);
  const std::size_t obs_steps = step_count(t_end, delta_n);

  Stepper stepper(model, dt);
  RngStream rng(seed);

  ObservedSimulation sim;
  sim.delta_n = delta_n;
  sim.x.reserve(obs_steps + 1);
  sim.v.reserve(obs_steps + 1);
  sim.x.push_back(stepper.x());
  sim.v.push_back(stepper.v());

  std::vector<CompensatedSum> pvar(pvar_powers.size());
  for (std::size_t i = 0; i < obs_steps; ++i) {
    for (std::uint32_t s = 0; s < fine_factor; ++s) {
      for (std::size_t j = 0; j < pvar_powers.size(); ++j)
        pvar[j].add(pow_nonneg(stepper.v(), 0.5 * pvar_powers[j]) * dt);
      stepper.step(rng);
    }
    sim.x.push_back(stepper.x());
    sim.v.push_back(stepper.v());
  }
  sim.clamped_steps = stepper.clamped();
  sim.fine_steps = obs_steps * fine_factor;
  sim.integrated_pvar.reserve(pvar.size());
  for (const auto& acc : pvar) sim.integrated_pvar.push_back(acc.value());
  return sim;
}

}  // namespace spotvol
