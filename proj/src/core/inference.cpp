#include "core/inference.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "core/special.hpp"

namespace spotvol {

double phi1(double p, double sigma) {
  if (!(p >= 1.0)) throw std::invalid_argument("phi1: p must be >= 1");
  if (!(sigma >= 0.0)) throw std::invalid_argument("phi1: sigma must be >= 0");
  const double mp = abs_moment(p);
  const double m2p = abs_moment(2.0 * p);
  return (m2p - mp * mp) / (mp * mp) * pow_nonneg(sigma, 2.0 * p);
}

double phi2(double p, double sigma, double eta_sq) {
  if (!(p >= 1.0)) throw std::invalid_argument("phi2: p must be >= 1");
  if (!(sigma >= 0.0)) throw std::invalid_argument("phi2: sigma must be >= 0");
  if (!(eta_sq >= 0.0)) throw std::invalid_argument("phi2: eta_sq must be >= 0");
  return (p * p / 3.0) * pow_nonneg(sigma, 2.0 * p - 2.0) * eta_sq;
}

double ou_eta_sq(const OuVolParams& params, double v) {
  if (!(v > 0.0)) throw std::invalid_argument("ou_eta_sq: singular at v <= 0");
  return params.beta_vol * params.beta_vol / (4.0 * v);
}

ConfidenceInterval confidence_interval(double estimate, const EstimatorConfig& cfg,
                                       double level) {
  cfg.validate();
  if (!(estimate >= 0.0))
    throw std::invalid_argument("confidence_interval: estimate must be >= 0");
  const double z = two_sided_normal_quantile(level);
  const double mp = abs_moment(cfg.p);
  const double m2p = abs_moment(2.0 * cfg.p);
  const double spread = std::sqrt(m2p - mp * mp);
  const double scale = mp * std::sqrt(cfg.window_ratio());
  if (!(scale > z * spread)) {
    const double min_rn = (z * spread / mp) * (z * spread / mp);
    std::ostringstream msg;
    msg << "confidence_interval: window too small for this level; need r_n > "
        << min_rn << " (have " << cfg.window_ratio() << ")";
    throw std::invalid_argument(msg.str());
  }
  ConfidenceInterval ci;
  ci.level = level;
  ci.lo = scale * estimate / (scale + z * spread);
  ci.hi = scale * estimate / (scale - z * spread);
  const double inv_p = 1.0 / cfg.p;
  ci.lo_sigma = std::pow(ci.lo, inv_p);
  ci.hi_sigma = std::pow(ci.hi, inv_p);
  return ci;
}

double relative_error_band(const EstimatorConfig& cfg, double level) {
  cfg.validate();
  const double z = two_sided_normal_quantile(level);
  const double mp = abs_moment(cfg.p);
  const double m2p = abs_moment(2.0 * cfg.p);
  return z * std::sqrt(m2p - mp * mp) / (mp * std::sqrt(cfg.window_ratio()));
}

WindowChoice choose_window(std::uint64_t n, double rho, std::optional<double> jump_q) {
  if (n < 2) throw std::invalid_argument("choose_window: n must be >= 2");
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("choose_window: rho must lie in (0,1)");
  if (jump_q && !(*jump_q >= 1.0 && *jump_q <= 2.0))
    throw std::invalid_argument("choose_window: jump q must lie in [1,2]");
  WindowChoice choice;
  const double dn = static_cast<double>(n);
  choice.h_n = std::pow(dn, rho - 1.0);
  choice.r_n = std::pow(dn, rho);
  const bool fast = jump_q ? (rho <= 2.0 / (2.0 + *jump_q)) : (rho < 0.5);
  choice.rate_exponent = fast ? 0.5 * rho : 0.5 * (1.0 - rho);
  return choice;
}

CltRegime classify_regime(double delta_n, double h_n, std::optional<double> jump_q) {
  if (!(delta_n > 0.0) || !(h_n > delta_n))
    throw std::invalid_argument("classify_regime: need 0 < delta_n < h_n");
  CltRegime regime;
  if (jump_q && *jump_q == 1.0 && h_n * h_n * h_n / delta_n < 1.0) {
    regime.tag = RegimeTag::JumpFiniteVariation;
    regime.rate_factor = std::sqrt(h_n / delta_n);
    return regime;
  }
  const double fast_ratio = jump_q
                                ? std::pow(h_n, 0.5 + 1.0 / *jump_q) / std::sqrt(delta_n)
                                : h_n / std::sqrt(delta_n);
  if (fast_ratio < 1.0) {
    regime.tag = RegimeTag::FastWindow;
    regime.rate_factor = std::sqrt(h_n / delta_n);
    return regime;
  }
  regime.tag = RegimeTag::Balanced;
  regime.beta_limit = std::sqrt(delta_n) / h_n;
  regime.rate_factor = 1.0 / std::sqrt(h_n);
  return regime;
}

const char* regime_name(RegimeTag tag) {
  switch (tag) {
    case RegimeTag::FastWindow: return "fast_window";
    case RegimeTag::Balanced: return "balanced";
    case RegimeTag::JumpFiniteVariation: return "jump_finite_variation";
  }
  return "unknown";
}

void attach_confidence_intervals(VolEstimateSeries& series, const EstimatorConfig& cfg,
                                 double level) {
  series.ci_lo.clear();
  series.ci_hi.clear();
  series.ci_lo.reserve(series.size());
  series.ci_hi.reserve(series.size());
  for (double estimate : series.sigma_p_hat) {
    const ConfidenceInterval ci = confidence_interval(estimate, cfg, level);
    series.ci_lo.push_back(ci.lo_sigma);
    series.ci_hi.push_back(ci.hi_sigma);
  }
}

}  // namespace spotvol
