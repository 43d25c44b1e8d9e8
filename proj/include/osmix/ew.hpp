#pragma once

#include <optional>

#include "osmix/rng.hpp"

namespace osmix {

// Exponentiated Weibull EW(alpha, beta, lambda):
//   F(x) = (1 - exp(-(lambda x)^beta))^alpha
//   f(x) = alpha beta lambda^beta x^(beta-1)
//          (1 - exp(-(lambda x)^beta))^(alpha-1) exp(-(lambda x)^beta)
// Shape-rate style scale: lambda has units 1/x.

struct EWParams {
  double alpha;
  double beta;
  double lambda;
};

// Throws std::invalid_argument unless all three are finite and > 0.
void validate(const EWParams& p);

double ew_log_pdf(double x, const EWParams& p);
double ew_pdf(double x, const EWParams& p);
double ew_log_cdf(double x, const EWParams& p);
double ew_cdf(double x, const EWParams& p);
double ew_quantile(double u, const EWParams& p);
double ew_sample(RngStream& rng, const EWParams& p);

// Density shape at the origin decides whether an interior mode exists:
//   Interior  alpha*beta > 1, unique mode at the closed-form approximation
//   None      alpha*beta < 1, density unbounded at 0, no mode
//   AtZero    alpha*beta = 1 with alpha <= 1, density decreasing from x = 0
//   Boundary  alpha*beta = 1 with alpha > 1 (uncharted corner; the formula
//             value, which degenerates to 0, is reported and flagged)
enum class EWModeRegime { Interior, None, AtZero, Boundary };

struct EWMode {
  EWModeRegime regime;
  std::optional<double> value;
};

EWMode ew_mode(const EWParams& p);

}  // namespace osmix
