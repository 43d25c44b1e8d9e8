#pragma once

#include "osmix/rng.hpp"
#include "osmix/sequence.hpp"

namespace osmix {

// Log pmf of the observed length, l ~ 1 + Binomial(n-1, w). Endpoints of w
// are allowed: w = 0 pins l = 1, w = 1 pins l = n.
double length_log_pmf(int l, int n, double w);

// Log joint density of the top-l order statistics of n iid EW draws:
// n!/(n-l)! * F(x_(n-l+1))^(n-l) * prod_j f(x_(n-j+1)). The censoring
// factor is skipped outright when l = n.
double joint_log_density(const Sequence& seq, const EWParams& p);

// Log density of x_(n-j) given x_(n-j+1) = x_upper, evaluated at x_lower:
// (n-j) f(x_lower) F(x_lower)^(n-j-1) / F(x_upper)^(n-j). A proper density
// on (0, x_upper); requires 1 <= j <= n-1.
double conditional_log_density(double x_lower, double x_upper, int j, int n,
                               const EWParams& p);

// Same joint density assembled as max marginal times the chain of
// conditionals. Agrees with joint_log_density identically; kept as an
// independently coded cross-check and for streaming evaluation.
double hierarchical_log_density(const Sequence& seq, const EWParams& p);

// Full observation log likelihood: length_log_pmf + joint_log_density.
double sequence_log_likelihood(const Sequence& seq, const Atom& atom);

// Generative draw: l = 1 + Binomial(n-1, w), then n iid EW values sorted
// descending with the top l retained. Consumes the length draw first, then
// exactly n value draws, so stream layout is fixed.
Sequence sample_sequence(RngStream& rng, const Atom& atom, int n);

// Marginal density of the j-th order statistic (ascending j, j = n is the
// maximum): n f(x) C(n-1, j-1) F^(j-1) (1-F)^(n-j).
double order_stat_marginal_log_pdf(double x, int j, int n, const EWParams& p);
double order_stat_marginal_pdf(double x, int j, int n, const EWParams& p);

}  // namespace osmix
