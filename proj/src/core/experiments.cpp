#include "core/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "core/csv.hpp"
#include "core/special.hpp"
#include "core/stats.hpp"

namespace spotvol {

namespace {

constexpr double kIndexTol = 1e-9;

// Each n block owns a disjoint range of stream ids so that path j is
// reproducible independently of n_paths and of the (p, rho) grid.
std::uint64_t path_stream(const ExperimentPlan& plan, std::size_t n_index,
                          std::uint64_t path) {
  return plan.seed.stream_id + (static_cast<std::uint64_t>(n_index) << 40) + path;
}

double window_length(std::uint64_t n, double rho) {
  return std::pow(static_cast<double>(n), rho - 1.0);
}

struct WindowSum {
  double estimate = 0.0;  // Sigma(p, delta_n, h_n)_t
  bool in_domain = false;
};

// Window sum over precomputed |increment|^p values; identical index
// conventions, summation order, and normalization as sigma_p_estimate.
WindowSum windowed_estimate(const std::vector<double>& powered,
                            const EstimatorConfig& cfg, double t) {
  WindowSum out;
  const double t_max =
      static_cast<double>(powered.size() - 1) * cfg.delta_n - cfg.h_n;
  if (t < -kIndexTol || t > t_max + kIndexTol) return out;
  const long long lo = grid_floor(t, cfg.delta_n);
  long long hi = grid_floor(t + cfg.h_n, cfg.delta_n);
  const auto last = static_cast<long long>(powered.size()) - 1;
  hi = std::min(hi, last);
  double sum = 0.0;
  for (long long i = lo + 1; i <= hi; ++i) sum += powered[static_cast<std::size_t>(i)];
  out.estimate =
      std::pow(cfg.delta_n, 1.0 - 0.5 * cfg.p) * sum / (abs_moment(cfg.p) * cfg.h_n);
  out.in_domain = true;
  return out;
}

std::vector<double> powered_increments(const std::vector<double>& x, double p) {
  std::vector<double> powered(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) powered[i] = pow_abs(x[i] - x[i - 1], p);
  return powered;
}

std::string regime_warning_for(const ModelSpec& model, double delta_n, double h_n) {
  const CltRegime regime = classify_regime(delta_n, h_n, model.jump_variation_order());
  if (regime.tag == RegimeTag::Balanced) {
    std::ostringstream msg;
    msg << "balanced regime proxy (sqrt(delta_n)/h_n = " << regime.beta_limit
        << "); fast-window theory assumed";
    return msg.str();
  }
  return {};
}

struct CellAccumulator {
  std::vector<double> values;  // one per usable path
  std::uint64_t zero_sigma = 0;
  std::uint64_t beyond_domain = 0;
};

}  // namespace

void ExperimentPlan::validate() const {
  model.validate();
  if (n_values.empty()) throw std::invalid_argument("plan: n_values must not be empty");
  for (auto n : n_values)
    if (n < 2) throw std::invalid_argument("plan: every n must be >= 2");
  if (rho_values.empty()) throw std::invalid_argument("plan: rho_values must not be empty");
  for (double rho : rho_values)
    if (!(rho > 0.0 && rho < 1.0))
      throw std::invalid_argument("plan: every rho must lie in (0,1)");
  if (p_values.empty()) throw std::invalid_argument("plan: p_values must not be empty");
  for (double p : p_values)
    if (!(p >= 1.0)) throw std::invalid_argument("plan: every p must be >= 1");
  if (n_paths < 1) throw std::invalid_argument("plan: n_paths must be >= 1");
  if (!(t_probe > 0.0 && t_probe < 1.0))
    throw std::invalid_argument("plan: t_probe must lie in (0,1)");
  if (!(level >= 0.0 && level < 1.0))
    throw std::invalid_argument("plan: level must lie in [0,1)");
  if (fine_factor < 1) throw std::invalid_argument("plan: fine_factor must be >= 1");
  for (auto n : n_values)
    for (double rho : rho_values)
      if (!(window_length(n, rho) > 1.0 / static_cast<double>(n)))
        throw std::invalid_argument("plan: h_n must exceed delta_n for every (n, rho)");
}

void parallel_for(std::uint64_t count, std::uint32_t threads,
                  const std::function<void(std::uint64_t)>& body) {
  std::uint32_t workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<std::uint32_t>(
      std::min<std::uint64_t>(workers, std::max<std::uint64_t>(count, 1)));
  if (workers <= 1) {
    for (std::uint64_t j = 0; j < count; ++j) body(j);
    return;
  }
  const std::uint64_t chunk = (count + workers - 1) / workers;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::uint32_t w = 0; w < workers; ++w) {
    const std::uint64_t begin = w * chunk;
    const std::uint64_t end = std::min(count, begin + chunk);
    pool.emplace_back([&, begin, end] {
      try {
        for (std::uint64_t j = begin; j < end; ++j) body(j);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& worker : pool) worker.join();
  if (first_error) std::rethrow_exception(first_error);
}

MeanRelativeError mean_relative_error_detail(const Path& path, const Observations& obs,
                                             const EstimatorConfig& cfg) {
  cfg.validate();
  MeanRelativeError out;
  const double t_max = obs.last_time() - cfg.h_n;
  const long long total = static_cast<long long>(obs.size()) - 1;
  CompensatedSum errors;
  const double inv_p = 1.0 / cfg.p;
  for (long long k = 1; k <= total; ++k) {
    const double t = static_cast<double>(k) * cfg.delta_n;
    if (t > t_max + kIndexTol) {
      ++out.beyond_domain_excluded;
      continue;
    }
    const double sigma_true = true_sigma_at(path, t);
    if (sigma_true <= 0.0) {
      ++out.zero_sigma_excluded;
      continue;
    }
    const double estimate = sigma_p_estimate(obs, cfg, t);
    errors.add(std::abs(std::pow(estimate, inv_p) - sigma_true) / sigma_true);
    ++out.points_used;
  }
  if (out.points_used > 0)
    out.value = errors.value() / static_cast<double>(out.points_used);
  return out;
}

double mean_relative_error(const Path& path, const Observations& obs,
                           const EstimatorConfig& cfg) {
  return mean_relative_error_detail(path, obs, cfg).value;
}

ExperimentReport run_error_table(const ExperimentPlan& plan) {
  plan.validate();
  ExperimentReport report;
  report.mode = "error_table";

  const std::size_t n_p = plan.p_values.size();
  const std::size_t n_rho = plan.rho_values.size();
  const std::size_t cells_per_path = n_p * n_rho;

  struct PerPath {
    std::vector<MeanRelativeError> cells;
    std::uint64_t clamped = 0;
    std::uint64_t steps = 0;
  };

  // cell accumulators per n block, indexed [p][rho]
  std::vector<std::vector<CellAccumulator>> accum(
      plan.n_values.size() * n_p, std::vector<CellAccumulator>(n_rho));
  std::vector<double> clamp_frac_per_n(plan.n_values.size(), 0.0);

  for (std::size_t ni = 0; ni < plan.n_values.size(); ++ni) {
    const std::uint64_t n = plan.n_values[ni];
    const double delta = 1.0 / static_cast<double>(n);
    std::vector<PerPath> results(plan.n_paths);

    parallel_for(plan.n_paths, plan.threads, [&](std::uint64_t j) {
      auto sim = simulate_observed(plan.model, 1.0, delta, plan.fine_factor,
                                   {plan.seed.master_seed, path_stream(plan, ni, j)});
      PerPath& slot = results[j];
      slot.clamped = sim.clamped_steps;
      slot.steps = sim.fine_steps;
      slot.cells.resize(cells_per_path);
      for (std::size_t pi = 0; pi < n_p; ++pi) {
        const double p = plan.p_values[pi];
        const auto powered = powered_increments(sim.x, p);
        const double inv_p = 1.0 / p;
        for (std::size_t ri = 0; ri < n_rho; ++ri) {
          EstimatorConfig cfg{p, delta, window_length(n, plan.rho_values[ri])};
          MeanRelativeError& cell = slot.cells[pi * n_rho + ri];
          CompensatedSum errors;
          for (std::uint64_t k = 1; k <= n; ++k) {
            const double t = static_cast<double>(k) * delta;
            const WindowSum w = windowed_estimate(powered, cfg, t);
            if (!w.in_domain) {
              ++cell.beyond_domain_excluded;
              continue;
            }
            const double sigma_true = std::sqrt(sim.v[k]);
            if (sigma_true <= 0.0) {
              ++cell.zero_sigma_excluded;
              continue;
            }
            errors.add(std::abs(std::pow(w.estimate, inv_p) - sigma_true) / sigma_true);
            ++cell.points_used;
          }
          if (cell.points_used > 0)
            cell.value = errors.value() / static_cast<double>(cell.points_used);
        }
      }
    });

    std::uint64_t clamped = 0, steps = 0;
    for (const auto& r : results) {
      clamped += r.clamped;
      steps += r.steps;
    }
    clamp_frac_per_n[ni] =
        steps == 0 ? 0.0 : static_cast<double>(clamped) / static_cast<double>(steps);

    for (std::size_t pi = 0; pi < n_p; ++pi)
      for (std::size_t ri = 0; ri < n_rho; ++ri) {
        CellAccumulator& acc = accum[ni * n_p + pi][ri];
        for (const auto& r : results) {
          const MeanRelativeError& cell = r.cells[pi * n_rho + ri];
          if (cell.points_used > 0) acc.values.push_back(cell.value);
          acc.zero_sigma += cell.zero_sigma_excluded;
          acc.beyond_domain += cell.beyond_domain_excluded;
        }
      }
  }

  for (std::size_t pi = 0; pi < n_p; ++pi)
    for (std::size_t ni = 0; ni < plan.n_values.size(); ++ni) {
      double best_value = INFINITY;
      double best_rho = NAN;
      for (std::size_t ri = 0; ri < n_rho; ++ri) {
        const CellAccumulator& acc = accum[ni * n_p + pi][ri];
        const SampleStats stats = summarize(acc.values);
        ReportCell cell;
        cell.p = plan.p_values[pi];
        cell.n = plan.n_values[ni];
        cell.rho = plan.rho_values[ri];
        cell.h_n = window_length(cell.n, cell.rho);
        cell.r_n = std::pow(static_cast<double>(cell.n), cell.rho);
        cell.n_paths = plan.n_paths;
        cell.mean_e = stats.mean;
        cell.se_e = stats.std_error;
        cell.clamp_frac = clamp_frac_per_n[ni];
        cell.zero_sigma_points = acc.zero_sigma;
        cell.beyond_domain_points = acc.beyond_domain;
        cell.regime_warning = regime_warning_for(plan.model, 1.0 / static_cast<double>(cell.n),
                                                 cell.h_n);
        report.cells.push_back(std::move(cell));
        if (stats.mean < best_value) {
          best_value = stats.mean;
          best_rho = plan.rho_values[ri];
        }
      }
      report.best_rho.push_back({plan.p_values[pi], plan.n_values[ni], best_rho});
    }

  return report;
}

namespace {

struct ProbeResult {
  double estimate = NAN;
  double sigma_p_true = NAN;
  bool valid = false;
};

// Per-path windowed estimate and truth at the probe time, for every
// (p, rho) cell; shared across coverage and rate-fit runs.
std::vector<ProbeResult> probe_path(const ExperimentPlan& plan, std::size_t n_index,
                                    std::uint64_t path_index, double t_end) {
  const std::uint64_t n = plan.n_values[n_index];
  const double delta = 1.0 / static_cast<double>(n);
  auto sim = simulate_observed(plan.model, t_end, delta, plan.fine_factor,
                               {plan.seed.master_seed, path_stream(plan, n_index, path_index)});
  const auto k_probe =
      static_cast<std::size_t>(grid_floor(plan.t_probe, delta));
  const double v_true = sim.v[std::min(k_probe, sim.v.size() - 1)];

  std::vector<ProbeResult> out(plan.p_values.size() * plan.rho_values.size());
  for (std::size_t pi = 0; pi < plan.p_values.size(); ++pi) {
    const double p = plan.p_values[pi];
    const auto powered = powered_increments(sim.x, p);
    for (std::size_t ri = 0; ri < plan.rho_values.size(); ++ri) {
      EstimatorConfig cfg{p, delta, window_length(n, plan.rho_values[ri])};
      const WindowSum w = windowed_estimate(powered, cfg, plan.t_probe);
      ProbeResult& slot = out[pi * plan.rho_values.size() + ri];
      if (!w.in_domain) continue;
      slot.estimate = w.estimate;
      slot.sigma_p_true = pow_nonneg(v_true, 0.5 * p);
      slot.valid = true;
    }
  }
  return out;
}

double probe_horizon(const ExperimentPlan& plan, std::uint64_t n) {
  double max_h = 0.0;
  for (double rho : plan.rho_values) max_h = std::max(max_h, window_length(n, rho));
  return plan.t_probe + max_h + 2.0 / static_cast<double>(n);
}

}  // namespace

ExperimentReport coverage_experiment(const ExperimentPlan& plan) {
  plan.validate();
  const double z = two_sided_normal_quantile(plan.level);
  // The interval is undefined when m_p sqrt(r_n) <= z sqrt(m_2p - m_p^2).
  for (double p : plan.p_values)
    for (std::uint64_t n : plan.n_values)
      for (double rho : plan.rho_values) {
        const double mp = abs_moment(p);
        const double spread = std::sqrt(abs_moment(2.0 * p) - mp * mp);
        const double r_n = window_length(n, rho) * static_cast<double>(n);
        if (!(mp * std::sqrt(r_n) > z * spread)) {
          std::ostringstream msg;
          msg << "coverage: window too small for level " << plan.level << " at p=" << p
              << " n=" << n << " rho=" << rho;
          throw std::invalid_argument(msg.str());
        }
      }

  ExperimentReport report;
  report.mode = "coverage";

  const std::size_t n_p = plan.p_values.size();
  const std::size_t n_rho = plan.rho_values.size();

  for (std::size_t ni = 0; ni < plan.n_values.size(); ++ni) {
    const std::uint64_t n = plan.n_values[ni];
    const double t_end = probe_horizon(plan, n);
    std::vector<std::vector<ProbeResult>> results(plan.n_paths);
    parallel_for(plan.n_paths, plan.threads,
                 [&](std::uint64_t j) { results[j] = probe_path(plan, ni, j, t_end); });

    for (std::size_t pi = 0; pi < n_p; ++pi)
      for (std::size_t ri = 0; ri < n_rho; ++ri) {
        const double p = plan.p_values[pi];
        const double rho = plan.rho_values[ri];
        EstimatorConfig cfg{p, 1.0 / static_cast<double>(n), window_length(n, rho)};
        const double mp = abs_moment(p);
        const double spread = std::sqrt(abs_moment(2.0 * p) - mp * mp);
        const double sqrt_rn = std::sqrt(cfg.window_ratio());

        std::uint64_t covered = 0, valid = 0, zero_sigma = 0, beyond = 0;
        std::vector<double> studentized;
        studentized.reserve(plan.n_paths);
        for (const auto& path_cells : results) {
          const ProbeResult& probe = path_cells[pi * n_rho + ri];
          if (!probe.valid) {
            ++beyond;
            continue;
          }
          if (!(probe.sigma_p_true > 0.0)) {
            ++zero_sigma;
            continue;
          }
          const ConfidenceInterval ci = confidence_interval(probe.estimate, cfg, plan.level);
          ++valid;
          if (ci.lo <= probe.sigma_p_true && probe.sigma_p_true <= ci.hi) ++covered;
          studentized.push_back(sqrt_rn * (probe.estimate - probe.sigma_p_true) * mp /
                                (probe.sigma_p_true * spread));
        }

        ReportCell cell;
        cell.p = p;
        cell.n = n;
        cell.rho = rho;
        cell.h_n = cfg.h_n;
        cell.r_n = cfg.window_ratio();
        cell.n_paths = plan.n_paths;
        cell.zero_sigma_points = zero_sigma;
        cell.beyond_domain_points = beyond;
        cell.regime_warning = regime_warning_for(plan.model, cfg.delta_n, cfg.h_n);
        if (valid > 0) {
          cell.coverage = static_cast<double>(covered) / static_cast<double>(valid);
          cell.se_cov = std::sqrt(cell.coverage * (1.0 - cell.coverage) /
                                  static_cast<double>(valid));
          const SampleStats stats = summarize(studentized);
          cell.stud_mean = stats.mean;
          cell.stud_var = stats.variance;
          cell.ks_dist = ks_distance_to_normal(studentized);
        }
        report.cells.push_back(std::move(cell));
      }
  }
  return report;
}

ExperimentReport rate_fit(const ExperimentPlan& plan) {
  plan.validate();
  if (plan.n_values.size() < 3)
    throw std::invalid_argument("rate_fit: need at least three n values to fit a slope");

  ExperimentReport report;
  report.mode = "rate_fit";

  const std::size_t n_p = plan.p_values.size();
  const std::size_t n_rho = plan.rho_values.size();
  const std::size_t n_n = plan.n_values.size();

  // probe errors per (n, p, rho) cell
  std::vector<SampleStats> cell_stats(n_n * n_p * n_rho);
  for (std::size_t ni = 0; ni < n_n; ++ni) {
    const double t_end = probe_horizon(plan, plan.n_values[ni]);
    std::vector<std::vector<ProbeResult>> results(plan.n_paths);
    parallel_for(plan.n_paths, plan.threads,
                 [&](std::uint64_t j) { results[j] = probe_path(plan, ni, j, t_end); });
    for (std::size_t pi = 0; pi < n_p; ++pi)
      for (std::size_t ri = 0; ri < n_rho; ++ri) {
        std::vector<double> errors;
        errors.reserve(plan.n_paths);
        for (const auto& path_cells : results) {
          const ProbeResult& probe = path_cells[pi * n_rho + ri];
          if (probe.valid)
            errors.push_back(std::abs(probe.estimate - probe.sigma_p_true));
        }
        cell_stats[(ni * n_p + pi) * n_rho + ri] = summarize(errors);
      }
  }

  for (std::size_t pi = 0; pi < n_p; ++pi)
    for (std::size_t ri = 0; ri < n_rho; ++ri) {
      std::vector<double> log_n, log_err;
      for (std::size_t ni = 0; ni < n_n; ++ni) {
        const SampleStats& stats = cell_stats[(ni * n_p + pi) * n_rho + ri];
        if (stats.count == 0 || !(stats.mean > 0.0)) continue;
        log_n.push_back(std::log(static_cast<double>(plan.n_values[ni])));
        log_err.push_back(std::log(stats.mean));
      }
      if (log_n.size() < 3)
        throw std::invalid_argument("rate_fit: fewer than three usable n values");
      const LinearFit fit = ols_fit(log_n, log_err);
      const double predicted = -choose_window(plan.n_values[0], plan.rho_values[ri],
                                              plan.model.jump_variation_order())
                                    .rate_exponent;
      for (std::size_t ni = 0; ni < n_n; ++ni) {
        const SampleStats& stats = cell_stats[(ni * n_p + pi) * n_rho + ri];
        ReportCell cell;
        cell.p = plan.p_values[pi];
        cell.n = plan.n_values[ni];
        cell.rho = plan.rho_values[ri];
        cell.h_n = window_length(cell.n, cell.rho);
        cell.r_n = std::pow(static_cast<double>(cell.n), cell.rho);
        cell.n_paths = plan.n_paths;
        cell.mean_e = stats.mean;
        cell.se_e = stats.std_error;
        cell.fitted_rate = fit.slope;
        cell.predicted_rate = predicted;
        cell.regime_warning =
            regime_warning_for(plan.model, 1.0 / static_cast<double>(cell.n), cell.h_n);
        report.cells.push_back(std::move(cell));
      }
    }
  return report;
}

const ReportCell& ExperimentReport::cell(double p, std::uint64_t n, double rho) const {
  for (const auto& cell : cells)
    if (cell.n == n && std::abs(cell.p - p) < 1e-12 && std::abs(cell.rho - rho) < 1e-12)
      return cell;
  throw std::out_of_range("report: no such cell");
}

double ExperimentReport::best_rho_for(double p, std::uint64_t n) const {
  for (const auto& entry : best_rho)
    if (entry.n == n && std::abs(entry.p - p) < 1e-12) return entry.rho;
  throw std::out_of_range("report: no best-rho entry for this (p, n)");
}

namespace {

void put_cell(std::ostream& out, double value) {
  if (!std::isnan(value)) out << format_real(value);
}

}  // namespace

void ExperimentReport::write_csv(const std::string& file) const {
  std::ostringstream body;
  body << "p,n,rho,mean_E,se_E,coverage,se_cov,fitted_rate,clamp_frac\n";
  for (const auto& cell : cells) {
    body << format_real(cell.p) << ',' << cell.n << ',' << format_real(cell.rho) << ',';
    put_cell(body, cell.mean_e);
    body << ',';
    put_cell(body, cell.se_e);
    body << ',';
    put_cell(body, cell.coverage);
    body << ',';
    put_cell(body, cell.se_cov);
    body << ',';
    put_cell(body, cell.fitted_rate);
    body << ',';
    put_cell(body, cell.clamp_frac);
    body << '\n';
  }
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + file);
  out << body.str();
  if (!out) throw std::runtime_error("write failed: " + file);
}

void ExperimentReport::print(std::ostream& out) const {
  out << "experiment mode: " << mode << "\n";
  out << std::left << std::setw(6) << "p" << std::setw(9) << "n" << std::setw(7) << "rho"
      << std::setw(12) << "mean_E" << std::setw(12) << "se_E" << std::setw(10) << "coverage"
      << std::setw(10) << "se_cov" << std::setw(12) << "fit_rate" << std::setw(12)
      << "pred_rate" << std::setw(12) << "clamp_frac" << std::setw(10) << "stud_var"
      << std::setw(9) << "ks" << "\n";
  auto num = [&](double v, int width) {
    std::ostringstream cell;
    if (std::isnan(v))
      cell << "-";
    else
      cell << std::setprecision(4) << v;
    out << std::setw(width) << cell.str();
  };
  for (const auto& cell : cells) {
    out << std::setw(6) << cell.p << std::setw(9) << cell.n << std::setw(7) << cell.rho;
    num(cell.mean_e, 12);
    num(cell.se_e, 12);
    num(cell.coverage, 10);
    num(cell.se_cov, 10);
    num(cell.fitted_rate, 12);
    num(cell.predicted_rate, 12);
    num(cell.clamp_frac, 12);
    num(cell.stud_var, 10);
    num(cell.ks_dist, 9);
    if (!cell.regime_warning.empty()) out << "  [" << cell.regime_warning << "]";
    out << "\n";
  }
  for (const auto& best : best_rho)
    out << "minimizing rho for p=" << best.p << ", n=" << best.n << ": " << best.rho
        << "\n";
}

}  // namespace spotvol
