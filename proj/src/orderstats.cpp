#include "osmix/orderstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "osmix/random.hpp"

namespace osmix {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void validate(const Sequence& seq, const std::string& label) {
  const int l = seq.l();
  if (seq.n < 1 || l < 1 || l > seq.n) {
    std::ostringstream msg;
    msg << label << ": need 1 <= l <= n, got l=" << l << " n=" << seq.n;
    throw std::invalid_argument(msg.str());
  }
  for (int i = 0; i < l; ++i) {
    const double v = seq.values[i];
    if (!(std::isfinite(v) && v > 0.0)) {
      std::ostringstream msg;
      msg << label << ": entry " << i << " must be finite and > 0";
      throw std::invalid_argument(msg.str());
    }
    if (i > 0 && !(seq.values[i - 1] > v)) {
      std::ostringstream msg;
      msg << label << ": entries must be strictly decreasing, violated at index " << i;
      throw std::invalid_argument(msg.str());
    }
  }
}

void validate(const Atom& atom) {
  validate(atom.ew);
  if (!(std::isfinite(atom.w) && atom.w > 0.0 && atom.w < 1.0))
    throw std::invalid_argument("Atom: w must be in (0,1)");
}

double length_log_pmf(int l, int n, double w) {
  if (n < 1 || l < 1 || l > n)
    throw std::domain_error("length_log_pmf: need 1 <= l <= n");
  if (!(w >= 0.0 && w <= 1.0))
    throw std::domain_error("length_log_pmf: w must be in [0,1]");
  // Degenerate endpoints: all mass on l = 1 (w = 0) or l = n (w = 1).
  if (w == 0.0) return l == 1 ? 0.0 : kNegInf;
  if (w == 1.0) return l == n ? 0.0 : kNegInf;
  return log_binomial_coefficient(n - 1, l - 1) + (l - 1) * std::log(w) +
         (n - l) * std::log1p(-w);
}

double joint_log_density(const Sequence& seq, const EWParams& p) {
  validate(seq);
  validate(p);
  const int n = seq.n;
  const int l = seq.l();
  double out = std::lgamma(n + 1.0) - std::lgamma(n - l + 1.0);
  for (int i = 0; i < l; ++i) out += ew_log_pdf(seq.values[i], p);
  if (l < n) out += (n - l) * ew_log_cdf(seq.values[l - 1], p);
  return out;
}

double conditional_log_density(double x_lower, double x_upper, int j, int n,
                               const EWParams& p) {
  if (!(x_lower > 0.0) || !(x_lower < x_upper))
    throw std::domain_error("conditional_log_density: need 0 < x_lower < x_upper");
  if (j < 1 || j > n - 1)
    throw std::domain_error("conditional_log_density: need 1 <= j <= n-1");
  double out = std::log(static_cast<double>(n - j)) + ew_log_pdf(x_lower, p) -
               (n - j) * ew_log_cdf(x_upper, p);
  if (j < n - 1) out += (n - j - 1) * ew_log_cdf(x_lower, p);
  return out;
}

double hierarchical_log_density(const Sequence& seq, const EWParams& p) {
  validate(seq);
  validate(p);
  const int n = seq.n;
  const int l = seq.l();
  // Marginal of the maximum, then one conditional per further entry.
  double out = std::log(static_cast<double>(n)) + ew_log_pdf(seq.values[0], p);
  if (n > 1) out += (n - 1) * ew_log_cdf(seq.values[0], p);
  for (int j = 1; j < l; ++j)
    out += conditional_log_density(seq.values[j], seq.values[j - 1], j, n, p);
  return out;
}

double sequence_log_likelihood(const Sequence& seq, const Atom& atom) {
  validate(seq);
  const double lp = length_log_pmf(seq.l(), seq.n, atom.w);
  if (lp == kNegInf) return kNegInf;
  return lp + joint_log_density(seq, atom.ew);
}

Sequence sample_sequence(RngStream& rng, const Atom& atom, int n) {
  if (n < 1) throw std::invalid_argument("sample_sequence: n must be >= 1");
  const int l = 1 + binomial_sample(rng, n - 1, atom.w);
  std::vector<double> draws(static_cast<std::size_t>(n));
  for (auto& d : draws) d = ew_sample(rng, atom.ew);
  std::sort(draws.begin(), draws.end(), std::greater<double>());
  Sequence seq;
  seq.n = n;
  seq.values = Eigen::Map<const Eigen::VectorXd>(draws.data(), l);
  return seq;
}

double order_stat_marginal_log_pdf(double x, int j, int n, const EWParams& p) {
  if (j < 1 || j > n)
    throw std::domain_error("order_stat_marginal_log_pdf: need 1 <= j <= n");
  const double lc = ew_log_cdf(x, p);
  double out = std::log(static_cast<double>(n)) + ew_log_pdf(x, p) +
               log_binomial_coefficient(n - 1, j - 1);
  if (j > 1) out += (j - 1) * lc;
  // log(1 - F) from log F; F rounded up to 1 gives the -inf this deserves.
  if (j < n) out += (lc < 0.0) ? (n - j) * log1mexp(-lc) : kNegInf;
  return out;
}

double order_stat_marginal_pdf(double x, int j, int n, const EWParams& p) {
  return std::exp(order_stat_marginal_log_pdf(x, j, n, p));
}

}  // namespace osmix
