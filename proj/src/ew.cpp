#include "osmix/ew.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "osmix/random.hpp"

namespace osmix {

namespace {

// log(1 - exp(-t)) with a fallback for t that underflowed to exactly 0,
// where the limit log(t) (supplied as log_t) is the right value.
double log_one_minus_exp(double t, double log_t) {
  if (t == 0.0) return log_t;
  return log1mexp(t);
}

}  // namespace

void validate(const EWParams& p) {
  if (!(std::isfinite(p.alpha) && p.alpha > 0.0) ||
      !(std::isfinite(p.beta) && p.beta > 0.0) ||
      !(std::isfinite(p.lambda) && p.lambda > 0.0))
    throw std::invalid_argument("EWParams: alpha, beta, lambda must be finite and > 0");
}

double ew_log_pdf(double x, const EWParams& p) {
  validate(p);
  if (!(x > 0.0)) throw std::domain_error("ew_log_pdf: x must be > 0");
  const double log_t = p.beta * std::log(p.lambda * x);
  const double t = std::exp(log_t);
  double out = std::log(p.alpha) + std::log(p.beta) + p.beta * std::log(p.lambda) - t;
  if (p.beta != 1.0) out += (p.beta - 1.0) * std::log(x);
  if (p.alpha != 1.0) out += (p.alpha - 1.0) * log_one_minus_exp(t, log_t);
  return out;
}

double ew_pdf(double x, const EWParams& p) { return std::exp(ew_log_pdf(x, p)); }

double ew_log_cdf(double x, const EWParams& p) {
  validate(p);
  if (!(x > 0.0)) throw std::domain_error("ew_log_cdf: x must be > 0");
  const double log_t = p.beta * std::log(p.lambda * x);
  const double t = std::exp(log_t);
  return p.alpha * log_one_minus_exp(t, log_t);
}

double ew_cdf(double x, const EWParams& p) {
  // The clamp keeps exp() away from exact 0 so downstream ratios of
  // censoring factors F^(n-l) stay well defined.
  const double lc = ew_log_cdf(x, p);
  return std::exp(lc < -745.0 ? -745.0 : lc);
}

double ew_quantile(double u, const EWParams& p) {
  validate(p);
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("ew_quantile: u must be in (0,1)");
  // inner = -log(1 - u^(1/alpha)); the split inside log1mexp keeps both
  // ends of (0,1) exact.
  const double t = -std::log(u) / p.alpha;
  const double inner = -log1mexp(t);
  if (inner > 0.0) return std::pow(inner, 1.0 / p.beta) / p.lambda;
  // exp(-t) underflowed, where inner -> exp(-t): take the power in logs.
  return std::exp(-t / p.beta) / p.lambda;
}

double ew_sample(RngStream& rng, const EWParams& p) {
  return ew_quantile(rng.next_double(), p);
}

EWMode ew_mode(const EWParams& p) {
  validate(p);
  const double ab = p.alpha * p.beta;
  if (ab < 1.0) return {EWModeRegime::None, std::nullopt};
  const double formula =
      std::pow(2.0 * (ab - 1.0) / (p.beta * (p.alpha + 1.0)), 1.0 / p.beta) / p.lambda;
  if (ab > 1.0) return {EWModeRegime::Interior, formula};
  if (p.alpha > 1.0) return {EWModeRegime::Boundary, formula};
  return {EWModeRegime::AtZero, 0.0};
}

}  // namespace osmix
