#pragma once

#include <vector>

namespace osmix {

// Lag-k autocorrelations for k = 1..max_lag. Each covariance uses the
// 1/(T-k) normalization against the 1/T variance, so a strictly
// alternating series scores exactly -1 at lag 1. Throws on a constant
// series (variance zero).
std::vector<double> autocorrelation(const std::vector<double>& x, int max_lag);

// Effective sample size by the initial-positive-sequence rule: sum
// adjacent autocorrelation pairs until one goes negative. A degenerate
// (constant) series reports ess = length with the flag set and no
// autocorrelations.
struct SeriesDiagnostics {
  double ess = 0.0;
  bool degenerate = false;
  std::vector<double> acf;
};

SeriesDiagnostics series_diagnostics(const std::vector<double>& x, int max_lag);

}  // namespace osmix
