#include "osmix/random.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace osmix {

double normal_sample(RngStream& rng, double mean, double sd) {
  // Box-Muller, cosine branch only. Two fresh uniforms per call keeps the
  // stream layout independent of call history.
  const double u1 = rng.next_double();
  const double u2 = rng.next_double();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mean + sd * r * std::cos(2.0 * M_PI * u2);
}

double gamma_sample(RngStream& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("gamma_sample: shape and rate must be > 0");
  // Marsaglia-Tsang squeeze; shape < 1 is boosted to shape + 1 and scaled
  // back by u^(1/shape).
  if (shape < 1.0) {
    const double u = rng.next_double();
    return gamma_sample(rng, shape + 1.0, rate) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal_sample(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.next_double();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double beta_sample(RngStream& rng, double a, double b) {
  const double ga = gamma_sample(rng, a, 1.0);
  const double gb = gamma_sample(rng, b, 1.0);
  return ga / (ga + gb);
}

int binomial_sample(RngStream& rng, int trials, double prob) {
  if (trials < 0) throw std::invalid_argument("binomial_sample: trials < 0");
  if (!(prob >= 0.0 && prob <= 1.0))
    throw std::invalid_argument("binomial_sample: prob outside [0,1]");
  int count = 0;
  for (int i = 0; i < trials; ++i)
    if (rng.next_double() < prob) ++count;
  return count;
}

double gamma_log_pdf(double x, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("gamma_log_pdf: shape and rate must be > 0");
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  // (shape-1)*log(x) written conditionally so shape == 1 at x -> 0 stays 0.
  double out = shape * std::log(rate) - std::lgamma(shape) - rate * x;
  if (shape != 1.0) out += (shape - 1.0) * std::log(x);
  return out;
}

double beta_log_pdf(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("beta_log_pdf: a and b must be > 0");
  if (!(x > 0.0) || !(x < 1.0)) {
    // Endpoints carry finite density only when the exponent there is zero.
    if (x == 0.0 && a == 1.0) return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    if (x == 1.0 && b == 1.0) return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    return -std::numeric_limits<double>::infinity();
  }
  double out = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  if (a != 1.0) out += (a - 1.0) * std::log(x);
  if (b != 1.0) out += (b - 1.0) * std::log1p(-x);
  return out;
}

double log1mexp(double t) {
  // Two-branch form: each side keeps full precision where the other loses it.
  if (!(t > 0.0)) return -std::numeric_limits<double>::infinity();
  if (t <= M_LN2) return std::log(-std::expm1(-t));
  return std::log1p(-std::exp(-t));
}

double log_binomial_coefficient(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace osmix
