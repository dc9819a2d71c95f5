#pragma once

#include <cstdint>
#include <optional>

#include "core/estimator.hpp"

namespace spotvol {

// Asymptotic variance from the price discretization alone:
// (m_{2p} - m_p^2) / m_p^2 * sigma^{2p}.
double phi1(double p, double sigma);

// Variance contribution of the volatility's own Brownian motion:
// (p^2 / 3) * sigma^{2p-2} * eta_sq, with eta_sq = eta1^2 + eta2^2.
double phi2(double p, double sigma, double eta_sq);

// eta1^2 + eta2^2 for the OU-variance model, where sigma = sqrt(v) gives
// eta_i = beta_vol * component_i / (2 sqrt(v)). Singular at v = 0.
double ou_eta_sq(const OuVolParams& params, double v);

struct ConfidenceInterval {
  double lo = 0.0;        // sigma^p scale
  double hi = 0.0;
  double lo_sigma = 0.0;  // p-th roots
  double hi_sigma = 0.0;
  double level = 0.0;
};

// Asymptotic interval for sigma_t^p around the windowed estimate:
//   m_p sqrt(r_n) S / (m_p sqrt(r_n) +- z sqrt(m_{2p} - m_p^2)),
// valid when m_p sqrt(r_n) > z sqrt(m_{2p} - m_p^2).
ConfidenceInterval confidence_interval(double estimate, const EstimatorConfig& cfg,
                                       double level);

// Half-width of the asymptotic relative-error band:
// z(level) sqrt(m_{2p} - m_p^2) / (m_p sqrt(r_n)).
double relative_error_band(const EstimatorConfig& cfg, double level);

struct WindowChoice {
  double h_n = 0.0;           // n^{rho-1}
  double r_n = 0.0;           // n^rho observations per window
  double rate_exponent = 0.0; // predicted error decay n^{-rate_exponent}
};

// Window from the r_n = n^rho scheme, with the predicted convergence-rate
// exponent: rho/2 inside the fast-window regime (rho < 1/2 for Brownian
// volatility, rho <= 2/(2+q) for pure-jump volatility), else (1-rho)/2.
WindowChoice choose_window(std::uint64_t n, double rho,
                           std::optional<double> jump_q = std::nullopt);

enum class RegimeTag { FastWindow, Balanced, JumpFiniteVariation };

struct CltRegime {
  RegimeTag tag = RegimeTag::FastWindow;
  double beta_limit = 0.0;   // meaningful for Balanced only
  double rate_factor = 0.0;  // sqrt(h_n/delta_n), or 1/sqrt(h_n) when Balanced
};

// Finite-sample proxy of the limiting regime conditions evaluated at the
// given (delta_n, h_n).
CltRegime classify_regime(double delta_n, double h_n,
                          std::optional<double> jump_q = std::nullopt);

const char* regime_name(RegimeTag tag);

// Fills the series' sigma-scale confidence columns point by point.
void attach_confidence_intervals(VolEstimateSeries& series, const EstimatorConfig& cfg,
                                 double level);

}  // namespace spotvol
