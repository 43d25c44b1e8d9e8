#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "osmix/orderstats.hpp"
#include "osmix/rng.hpp"
#include "osmix/sequence.hpp"

namespace osmix {

// Base-measure and concentration hyperparameters. Gammas are shape-rate:
// alpha ~ Gamma(alpha1, alpha2), beta ~ Gamma(beta1, beta2),
// lambda ~ Gamma(lambda1, lambda2), w ~ Beta(a, b), nu ~ Gamma(tau1, tau2).
struct Hyperparams {
  double a = 1.0;
  double b = 1.0;
  double alpha1 = 1.0;
  double alpha2 = 0.1;
  double beta1 = 1.0;
  double beta2 = 0.1;
  double lambda1 = 1.0;
  double lambda2 = 0.1;
  double tau1 = 1.0;
  double tau2 = 1.0;
};

void validate(const Hyperparams& h);

struct StepSizes {
  double alpha = 0.3;
  double beta = 0.3;
  double lambda = 0.3;
  double w = 0.05;
};

struct MCMCConfig {
  int iterations = 10000;
  int burn_in = 200;
  int thin = 10;
  int aux_count = 3;
  int mh_inner = 20;
  StepSizes step_sizes;
  std::uint64_t seed = 0;
};

void validate(const MCMCConfig& c);

// Live sampler state. counts[k] observations carry assignment k; atoms[k]
// is that cluster's unique parameter vector. No empty cluster survives a
// sweep.
struct ChainState {
  std::vector<int> assignments;
  std::vector<Atom> atoms;
  std::vector<int> counts;
  double nu = 1.0;

  int n_clusters() const { return static_cast<int>(atoms.size()); }
};

// Throws std::logic_error if counts/assignments/atoms disagree or any value
// is non-finite. n_obs is the expected number of observations.
void check_state(const ChainState& state, int n_obs);

// One retained snapshot: assignments plus the atom each observation sat in
// (materialized per observation so summaries can average within clusters).
struct TraceSample {
  std::vector<int> assignments;
  std::vector<Atom> obs_atoms;
  double nu = 0.0;
  int n_clusters = 0;
};

// Joint metropolis acceptance accounting for the atom refresh. One
// proposal updates all four parameters at once, so there is a single
// acceptance rate; w proposals leaving (0,1) are counted separately
// because they are rejected before the target is evaluated.
struct AcceptanceStats {
  std::int64_t proposals = 0;
  std::int64_t accepted = 0;
  std::int64_t w_out_of_bounds = 0;

  double rate() const {
    return proposals == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
  }
};

struct Trace {
  int n_obs = 0;
  int seq_n = 0;
  std::vector<TraceSample> samples;
  AcceptanceStats atom_acceptance;
};

// Pluggable observation log likelihood. The sampler default is
// sequence_log_likelihood; tests substitute a constant to expose the bare
// Chinese-restaurant dynamics.
using SeqLogLik = std::function<double(const Sequence&, const Atom&)>;

SeqLogLik default_seq_loglik();

Atom g0_sample(RngStream& rng, const Hyperparams& h);
double g0_log_density(const Atom& atom, const Hyperparams& h);

// Multinomial reassignment weights for one removed observation: live
// cluster k gets N*_k f(x|theta_k), auxiliary slot gets (nu/c) f(x|theta).
// `state` must already exclude the observation (its counts and atoms are
// the N-1 others). Returns N* + c probabilities summing to 1. Throws
// std::runtime_error if every candidate has zero likelihood.
Eigen::VectorXd assignment_weights(const Sequence& seq, const ChainState& state,
                                   const std::vector<Atom>& aux,
                                   const SeqLogLik& loglik = default_seq_loglik());

// One full reassignment pass over the data (algorithm-8 style, aux_count
// fresh auxiliaries per observation; a singleton's own atom takes the
// first auxiliary slot). Mutates state in place.
void gibbs_assignment_sweep(ChainState& state, const std::vector<Sequence>& data,
                            const Hyperparams& h, int aux_count, RngStream& rng,
                            const SeqLogLik& loglik = default_seq_loglik());

// Unnormalized log posterior for one cluster's atom: prior plus member
// log likelihoods. -inf outside the support (w outside (0,1), any
// nonpositive EW parameter).
double mh_log_target(const Atom& atom, const std::vector<Sequence>& data,
                     const std::vector<int>& members, const Hyperparams& h,
                     const SeqLogLik& loglik = default_seq_loglik());

// Single metropolis decision given the log acceptance ratio; consumes one
// uniform.
bool mh_accept(double log_ratio, RngStream& rng);

// mh_inner random-walk steps on cluster k's atom: exponentiated-Normal
// proposals for (alpha, beta, lambda), plain Normal for w, jointly
// accepted with the log-scale Jacobian factor (a'b'l')/(abl) in the
// ratio. Updates state.atoms[k] and the acceptance accumulators.
void mh_cluster_update(int k, ChainState& state, const std::vector<Sequence>& data,
                       const Hyperparams& h, const MCMCConfig& config, RngStream& rng,
                       AcceptanceStats& stats,
                       const SeqLogLik& loglik = default_seq_loglik());

// Auxiliary-variable Gibbs refresh of the concentration parameter:
// gamma | nu ~ Beta(nu+1, N), then nu | gamma from the two-Gamma mixture
// with odds (tau1 + N* - 1) / (N (tau2 - log gamma)).
void nu_update(ChainState& state, int n_obs, const Hyperparams& h, RngStream& rng);

// Full sampler: per iteration one assignment sweep, one atom refresh per
// live cluster, one nu update. Snapshots are kept post burn-in every
// `thin` iterations: floor((iterations - burn_in)/thin) samples. The rng
// argument is split into fixed substreams (init, sweep, atoms, nu), so
// the three update stages draw from independent streams.
Trace run_chain(const std::vector<Sequence>& data, const Hyperparams& h,
                const MCMCConfig& config, const RngStream& rng,
                const SeqLogLik& loglik = default_seq_loglik());

// Prior mean of the number of occupied clusters among N observations,
// nu * log((nu + N)/nu).
double prior_expected_clusters(double nu, int N);

}  // namespace osmix
