#pragma once

#include "osmix/rng.hpp"

namespace osmix {

// Variate generators on top of RngStream. Gamma is parameterized
// shape-rate throughout (mean = shape/rate).

double normal_sample(RngStream& rng, double mean = 0.0, double sd = 1.0);
double gamma_sample(RngStream& rng, double shape, double rate);
double beta_sample(RngStream& rng, double a, double b);
int binomial_sample(RngStream& rng, int trials, double prob);

double gamma_log_pdf(double x, double shape, double rate);
double beta_log_pdf(double x, double a, double b);

// log(1 - exp(-t)) for t > 0 without cancellation.
double log1mexp(double t);

// log(binomial(n, k)) via lgamma.
double log_binomial_coefficient(int n, int k);

}  // namespace osmix
