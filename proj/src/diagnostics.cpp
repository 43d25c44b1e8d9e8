#include "osmix/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace osmix {

namespace {

double series_variance(const std::vector<double>& x, double mean) {
  double acc = 0.0;
  for (double v : x) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(x.size());
}

}  // namespace

std::vector<double> autocorrelation(const std::vector<double>& x, int max_lag) {
  const int t = static_cast<int>(x.size());
  if (t < 2) throw std::invalid_argument("autocorrelation: need at least 2 points");
  if (max_lag < 1 || max_lag > t - 1)
    throw std::invalid_argument("autocorrelation: need 1 <= max_lag <= T-1");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(t);
  const double var = series_variance(x, mean);
  if (var == 0.0) throw std::invalid_argument("autocorrelation: constant series");
  std::vector<double> acf(static_cast<std::size_t>(max_lag));
  for (int k = 1; k <= max_lag; ++k) {
    double acc = 0.0;
    for (int i = 0; i + k < t; ++i) acc += (x[i] - mean) * (x[i + k] - mean);
    acf[static_cast<std::size_t>(k - 1)] = acc / static_cast<double>(t - k) / var;
  }
  return acf;
}

SeriesDiagnostics series_diagnostics(const std::vector<double>& x, int max_lag) {
  const int t = static_cast<int>(x.size());
  if (t < 2) throw std::invalid_argument("series_diagnostics: need at least 2 points");
  SeriesDiagnostics out;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(t);
  if (series_variance(x, mean) == 0.0) {
    out.degenerate = true;
    out.ess = static_cast<double>(t);
    return out;
  }
  out.acf = autocorrelation(x, std::min(max_lag, t - 1));

  // Integrated autocorrelation time over initial positive pairs
  // (rho_0 + rho_1), (rho_2 + rho_3), ...; truncate at the first
  // nonpositive pair sum.
  double tau = 0.0;
  const auto rho = [&](int k) { return k == 0 ? 1.0 : out.acf[static_cast<std::size_t>(k - 1)]; };
  const int have = static_cast<int>(out.acf.size());
  for (int m = 0; 2 * m <= have; ++m) {
    const double pair = rho(2 * m) + (2 * m + 1 <= have ? rho(2 * m + 1) : 0.0);
    if (m > 0 && pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  tau -= 1.0;
  tau = std::max(tau, 1e-12);
  out.ess = std::min(static_cast<double>(t), static_cast<double>(t) / tau);
  return out;
}

}  // namespace osmix
