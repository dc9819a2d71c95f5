#include "core/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace spotvol {

namespace {

std::ofstream open_out(const std::string& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + file);
  return out;
}

std::ifstream open_in(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open for reading: " + file);
  return in;
}

std::vector<double> parse_row(const std::string& line, std::size_t expected,
                              const std::string& file) {
  std::vector<double> row;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) {
      row.push_back(NAN);
      continue;
    }
    std::size_t used = 0;
    row.push_back(std::stod(cell, &used));
  }
  if (row.size() < expected)
    throw std::runtime_error("malformed CSV row in " + file + ": " + line);
  return row;
}

void check_uniform_grid(const std::vector<double>& t, const std::string& file) {
  if (t.size() < 2) throw std::runtime_error("CSV has fewer than 2 rows: " + file);
  const double step = t[1] - t[0];
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double expected = t[0] + static_cast<double>(i) * step;
    if (std::abs(t[i] - expected) > 1e-9 * std::max(1.0, std::abs(expected)))
      throw std::runtime_error("CSV time grid is not uniform: " + file);
  }
}

}  // namespace

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_path_csv(const Path& path, const std::string& file) {
  auto out = open_out(file);
  out << "t,x,v\n";
  for (std::size_t k = 0; k < path.size(); ++k) {
    out << format_real(path.time_at(k)) << ',' << format_real(path.x[k]) << ','
        << format_real(path.v[k]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + file);
}

Path read_path_csv(const std::string& file) {
  auto in = open_in(file);
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,x,v", 0) != 0)
    throw std::runtime_error("expected header t,x,v in " + file);
  std::vector<double> t;
  Path path;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto row = parse_row(line, 3, file);
    t.push_back(row[0]);
    path.x.push_back(row[1]);
    path.v.push_back(row[2]);
  }
  check_uniform_grid(t, file);
  path.dt_fine = t[1] - t[0];
  path.t_end = t.back();
  return path;
}

void write_obs_csv(const Observations& obs, const std::string& file) {
  auto out = open_out(file);
  out << "t,x\n";
  for (std::size_t i = 0; i < obs.size(); ++i) {
    out << format_real(static_cast<double>(i) * obs.delta_n) << ','
        << format_real(obs.x[i]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + file);
}

Observations read_obs_csv(const std::string& file) {
  auto in = open_in(file);
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,x", 0) != 0)
    throw std::runtime_error("expected header t,x in " + file);
  std::vector<double> t;
  Observations obs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto row = parse_row(line, 2, file);
    t.push_back(row[0]);
    obs.x.push_back(row[1]);
  }
  check_uniform_grid(t, file);
  obs.delta_n = t[1] - t[0];
  return obs;
}

void write_series_csv(const VolEstimateSeries& series, const std::string& file,
                      const Path* truth) {
  auto out = open_out(file);
  out << "t,sigma_p_hat,sigma_hat,ci_lo,ci_hi";
  if (truth) out << ",sigma_true,rel_err";
  out << '\n';
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_real(series.times[i]) << ',' << format_real(series.sigma_p_hat[i])
        << ',' << format_real(series.sigma_hat[i]) << ',';
    if (series.has_ci()) out << format_real(series.ci_lo[i]);
    out << ',';
    if (series.has_ci()) out << format_real(series.ci_hi[i]);
    if (truth) {
      const double sigma_true = true_sigma_at(*truth, series.times[i]);
      out << ',' << format_real(sigma_true) << ',';
      if (sigma_true > 0.0)
        out << format_real(std::abs(series.sigma_hat[i] - sigma_true) / sigma_true);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + file);
}

}  // namespace spotvol
