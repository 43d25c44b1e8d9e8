#include "osmix/dpmm.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "osmix/random.hpp"

namespace osmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

int categorical(const Eigen::VectorXd& probs, RngStream& rng) {
  const double u = rng.next_double();
  double acc = 0.0;
  for (int k = 0; k < probs.size(); ++k) {
    acc += probs[k];
    if (u < acc) return k;
  }
  return static_cast<int>(probs.size()) - 1;
}

void require_positive(double v, const char* name) {
  if (!(std::isfinite(v) && v > 0.0)) {
    std::ostringstream msg;
    msg << name << " must be finite and > 0";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

void validate(const Hyperparams& h) {
  require_positive(h.a, "Hyperparams.a");
  require_positive(h.b, "Hyperparams.b");
  require_positive(h.alpha1, "Hyperparams.alpha1");
  require_positive(h.alpha2, "Hyperparams.alpha2");
  require_positive(h.beta1, "Hyperparams.beta1");
  require_positive(h.beta2, "Hyperparams.beta2");
  require_positive(h.lambda1, "Hyperparams.lambda1");
  require_positive(h.lambda2, "Hyperparams.lambda2");
  require_positive(h.tau1, "Hyperparams.tau1");
  require_positive(h.tau2, "Hyperparams.tau2");
}

void validate(const MCMCConfig& c) {
  if (c.iterations < 1) throw std::invalid_argument("MCMCConfig.iterations must be >= 1");
  if (c.burn_in < 0) throw std::invalid_argument("MCMCConfig.burn_in must be >= 0");
  if (c.burn_in >= c.iterations)
    throw std::invalid_argument("MCMCConfig.burn_in must be < iterations");
  if (c.thin < 1) throw std::invalid_argument("MCMCConfig.thin must be >= 1");
  if (c.aux_count < 1) throw std::invalid_argument("MCMCConfig.aux_count must be >= 1");
  if (c.mh_inner < 1) throw std::invalid_argument("MCMCConfig.mh_inner must be >= 1");
  require_positive(c.step_sizes.alpha, "MCMCConfig.step_sizes.alpha");
  require_positive(c.step_sizes.beta, "MCMCConfig.step_sizes.beta");
  require_positive(c.step_sizes.lambda, "MCMCConfig.step_sizes.lambda");
  require_positive(c.step_sizes.w, "MCMCConfig.step_sizes.w");
}

void check_state(const ChainState& state, int n_obs) {
  if (static_cast<int>(state.assignments.size()) != n_obs)
    throw std::logic_error("ChainState: assignments length != n_obs");
  if (state.atoms.size() != state.counts.size())
    throw std::logic_error("ChainState: atoms/counts length mismatch");
  const int live = state.n_clusters();
  std::vector<int> recount(live, 0);
  for (int c : state.assignments) {
    if (c < 0 || c >= live) throw std::logic_error("ChainState: assignment out of range");
    ++recount[c];
  }
  for (int k = 0; k < live; ++k) {
    if (recount[k] != state.counts[k])
      throw std::logic_error("ChainState: counts disagree with assignments");
    if (state.counts[k] < 1) throw std::logic_error("ChainState: empty live cluster");
    const Atom& a = state.atoms[k];
    if (!(std::isfinite(a.ew.alpha) && a.ew.alpha > 0.0 && std::isfinite(a.ew.beta) &&
          a.ew.beta > 0.0 && std::isfinite(a.ew.lambda) && a.ew.lambda > 0.0 &&
          std::isfinite(a.w) && a.w > 0.0 && a.w < 1.0))
      throw std::logic_error("ChainState: non-finite or out-of-support atom");
  }
  if (!(std::isfinite(state.nu) && state.nu > 0.0))
    throw std::logic_error("ChainState: nu must be finite and > 0");
}

SeqLogLik default_seq_loglik() {
  return [](const Sequence& seq, const Atom& atom) {
    return sequence_log_likelihood(seq, atom);
  };
}

Atom g0_sample(RngStream& rng, const Hyperparams& h) {
  validate(h);
  // Draw order alpha, beta, lambda, w is part of the deterministic layout.
  Atom atom;
  atom.ew.alpha = gamma_sample(rng, h.alpha1, h.alpha2);
  atom.ew.beta = gamma_sample(rng, h.beta1, h.beta2);
  atom.ew.lambda = gamma_sample(rng, h.lambda1, h.lambda2);
  atom.w = beta_sample(rng, h.a, h.b);
  return atom;
}

double g0_log_density(const Atom& atom, const Hyperparams& h) {
  validate(h);
  // Off-support atoms get -inf even when the component densities would be
  // finite at the boundary (Beta(1,1) at w=0, say); w lives in the open
  // interval and the kernel parameters are strictly positive.
  if (!(atom.ew.alpha > 0.0) || !(atom.ew.beta > 0.0) || !(atom.ew.lambda > 0.0) ||
      !(atom.w > 0.0 && atom.w < 1.0) || !std::isfinite(atom.ew.alpha) ||
      !std::isfinite(atom.ew.beta) || !std::isfinite(atom.ew.lambda))
    return kNegInf;
  return gamma_log_pdf(atom.ew.alpha, h.alpha1, h.alpha2) +
         gamma_log_pdf(atom.ew.beta, h.beta1, h.beta2) +
         gamma_log_pdf(atom.ew.lambda, h.lambda1, h.lambda2) +
         beta_log_pdf(atom.w, h.a, h.b);
}

Eigen::VectorXd assignment_weights(const Sequence& seq, const ChainState& state,
                                   const std::vector<Atom>& aux, const SeqLogLik& loglik) {
  const int live = state.n_clusters();
  const int c = static_cast<int>(aux.size());
  if (c < 1) throw std::invalid_argument("assignment_weights: need at least one auxiliary");
  // The common denominator N-1+nu drops out under normalization.
  Eigen::VectorXd lw(live + c);
  for (int k = 0; k < live; ++k)
    lw[k] = std::log(static_cast<double>(state.counts[k])) + loglik(seq, state.atoms[k]);
  const double log_nu_share = std::log(state.nu) - std::log(static_cast<double>(c));
  for (int s = 0; s < c; ++s) lw[live + s] = log_nu_share + loglik(seq, aux[s]);
  const double m = lw.maxCoeff();
  if (!(m > kNegInf))
    throw std::runtime_error(
        "assignment_weights: every candidate cluster has zero likelihood (data/prior mismatch)");
  Eigen::VectorXd w = (lw.array() - m).exp();
  w /= w.sum();
  return w;
}

void gibbs_assignment_sweep(ChainState& state, const std::vector<Sequence>& data,
                            const Hyperparams& h, int aux_count, RngStream& rng,
                            const SeqLogLik& loglik) {
  const int n = static_cast<int>(data.size());
  if (static_cast<int>(state.assignments.size()) != n)
    throw std::invalid_argument("gibbs_assignment_sweep: state/data size mismatch");
  if (aux_count < 1) throw std::invalid_argument("gibbs_assignment_sweep: aux_count must be >= 1");
  std::vector<Atom> aux(static_cast<std::size_t>(aux_count));
  for (int i = 0; i < n; ++i) {
    const int k_old = state.assignments[i];
    --state.counts[k_old];
    int fresh_from = 0;
    if (state.counts[k_old] == 0) {
      // Singleton: its atom keeps the first auxiliary slot; the emptied
      // cluster is swap-removed and the moved label rewritten.
      aux[0] = state.atoms[k_old];
      fresh_from = 1;
      state.assignments[i] = -1;
      const int last = state.n_clusters() - 1;
      if (k_old != last) {
        state.atoms[k_old] = state.atoms[last];
        state.counts[k_old] = state.counts[last];
        for (int& c : state.assignments)
          if (c == last) c = k_old;
      }
      state.atoms.pop_back();
      state.counts.pop_back();
    }
    for (int s = fresh_from; s < aux_count; ++s) aux[s] = g0_sample(rng, h);
    Eigen::VectorXd weights;
    try {
      weights = assignment_weights(data[i], state, aux, loglik);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("observation " + std::to_string(i) + ": " + e.what());
    }
    const int pick = categorical(weights, rng);
    const int live = state.n_clusters();
    if (pick < live) {
      state.assignments[i] = pick;
      ++state.counts[pick];
    } else {
      state.atoms.push_back(aux[pick - live]);
      state.counts.push_back(1);
      state.assignments[i] = live;
    }
  }
}

double mh_log_target(const Atom& atom, const std::vector<Sequence>& data,
                     const std::vector<int>& members, const Hyperparams& h,
                     const SeqLogLik& loglik) {
  double out = g0_log_density(atom, h);
  if (out == kNegInf) return out;
  for (int i : members) {
    out += loglik(data[i], atom);
    if (out == kNegInf) return out;
  }
  return out;
}

bool mh_accept(double log_ratio, RngStream& rng) {
  return std::log(rng.next_double()) < log_ratio;
}

void mh_cluster_update(int k, ChainState& state, const std::vector<Sequence>& data,
                       const Hyperparams& h, const MCMCConfig& config, RngStream& rng,
                       AcceptanceStats& stats, const SeqLogLik& loglik) {
  if (k < 0 || k >= state.n_clusters())
    throw std::invalid_argument("mh_cluster_update: cluster index out of range");
  std::vector<int> members;
  for (int i = 0; i < static_cast<int>(state.assignments.size()); ++i)
    if (state.assignments[i] == k) members.push_back(i);
  Atom cur = state.atoms[k];
  double cur_target = mh_log_target(cur, data, members, h, loglik);
  for (int step = 0; step < config.mh_inner; ++step) {
    ++stats.proposals;
    Atom prop;
    prop.ew.alpha = std::exp(normal_sample(rng, std::log(cur.ew.alpha), config.step_sizes.alpha));
    prop.ew.beta = std::exp(normal_sample(rng, std::log(cur.ew.beta), config.step_sizes.beta));
    prop.ew.lambda = std::exp(normal_sample(rng, std::log(cur.ew.lambda), config.step_sizes.lambda));
    prop.w = normal_sample(rng, cur.w, config.step_sizes.w);
    if (!(prop.w > 0.0 && prop.w < 1.0)) {
      // Out-of-support w rejects before the target is touched; no
      // accept-decision uniform is consumed.
      ++stats.w_out_of_bounds;
      continue;
    }
    const double prop_target = mh_log_target(prop, data, members, h, loglik);
    const double log_jacobian = std::log(prop.ew.alpha / cur.ew.alpha) +
                                std::log(prop.ew.beta / cur.ew.beta) +
                                std::log(prop.ew.lambda / cur.ew.lambda);
    if (mh_accept(prop_target - cur_target + log_jacobian, rng)) {
      cur = prop;
      cur_target = prop_target;
      ++stats.accepted;
    }
  }
  state.atoms[k] = cur;
}

void nu_update(ChainState& state, int n_obs, const Hyperparams& h, RngStream& rng) {
  validate(h);
  const int nstar = state.n_clusters();
  if (n_obs < 1 || nstar < 1)
    throw std::invalid_argument("nu_update: need N >= 1 and at least one cluster");
  const double gamma = beta_sample(rng, state.nu + 1.0, static_cast<double>(n_obs));
  const double rate = h.tau2 - std::log(gamma);
  const double odds = (h.tau1 + nstar - 1.0) / (n_obs * rate);
  const double pi_gamma = odds / (1.0 + odds);
  const double shape =
      rng.next_double() < pi_gamma ? h.tau1 + nstar : h.tau1 + nstar - 1.0;
  state.nu = gamma_sample(rng, shape, rate);
}

Trace run_chain(const std::vector<Sequence>& data, const Hyperparams& h,
                const MCMCConfig& config, const RngStream& rng, const SeqLogLik& loglik) {
  validate(h);
  validate(config);
  if (data.empty()) throw std::invalid_argument("run_chain: data must be nonempty");
  const int n_obs = static_cast<int>(data.size());
  for (int i = 0; i < n_obs; ++i) {
    validate(data[i], "observation " + std::to_string(i));
    if (data[i].n != data[0].n)
      throw std::invalid_argument("run_chain: all observations must share the same n");
  }

  RngStream init_rng = rng.substream(0);
  RngStream sweep_rng = rng.substream(1);
  RngStream atom_rng = rng.substream(2);
  RngStream nu_rng = rng.substream(3);

  ChainState state;
  state.assignments.assign(static_cast<std::size_t>(n_obs), 0);
  state.atoms = {g0_sample(init_rng, h)};
  state.counts = {n_obs};
  state.nu = h.tau1 / h.tau2;

  Trace trace;
  trace.n_obs = n_obs;
  trace.seq_n = data[0].n;
  trace.samples.reserve(
      static_cast<std::size_t>((config.iterations - config.burn_in) / config.thin));

  for (int t = 1; t <= config.iterations; ++t) {
    gibbs_assignment_sweep(state, data, h, config.aux_count, sweep_rng, loglik);
    for (int k = 0; k < state.n_clusters(); ++k)
      mh_cluster_update(k, state, data, h, config, atom_rng, trace.atom_acceptance, loglik);
    nu_update(state, n_obs, h, nu_rng);
    try {
      check_state(state, n_obs);
    } catch (const std::logic_error& e) {
      throw std::runtime_error("run_chain: bad state at iteration " + std::to_string(t) +
                               ": " + e.what());
    }
    if (t > config.burn_in && (t - config.burn_in) % config.thin == 0) {
      TraceSample s;
      s.assignments = state.assignments;
      s.obs_atoms.reserve(static_cast<std::size_t>(n_obs));
      for (int i = 0; i < n_obs; ++i) s.obs_atoms.push_back(state.atoms[state.assignments[i]]);
      s.nu = state.nu;
      s.n_clusters = state.n_clusters();
      trace.samples.push_back(std::move(s));
    }
  }
  return trace;
}

double prior_expected_clusters(double nu, int N) {
  if (!(std::isfinite(nu) && nu > 0.0))
    throw std::domain_error("prior_expected_clusters: nu must be > 0");
  if (N < 1) throw std::domain_error("prior_expected_clusters: N must be >= 1");
  return nu * std::log1p(static_cast<double>(N) / nu);
}

}  // namespace osmix
