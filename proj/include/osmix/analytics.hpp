#pragma once

#include <vector>

#include "osmix/partition.hpp"

namespace osmix {

// Expected value of the first censored entry: draw l ~ 1 + Binomial(n-1, w)
// and n iid EW values; the (n-l)-th ascending order statistic is the
// largest value the observation failed to record. l = n contributes 0.
struct OCResult {
  double value = 0.0;
  double mc_se = 0.0;
  bool flagged = false;
  double epsilon = 0.0;
  int draws = 0;
};

OCResult oc_statistic(const Atom& atom, int n, double epsilon, int draws, RngStream& rng);

// Mean over observations of the sum of their observed entries.
struct ACResult {
  double value = 0.0;
  std::vector<double> per_observation;
};

ACResult ac_statistic(const std::vector<Sequence>& sequences);

// Monte-Carlo mean of the j-th ascending order statistic of n iid EW
// draws, no censoring.
struct MCEstimate {
  double value = 0.0;
  double mc_se = 0.0;
};

MCEstimate expected_order_statistic(const EWParams& p, int j, int n, int draws,
                                    RngStream& rng);

// Posterior predictive check of one partition cluster's AC: each retained
// sample regenerates the cluster's member observations from their
// per-observation atoms `reps_per_sample` times. Replicate generation is
// keyed on (sample, rep, observation id), so member order cannot change
// the replicate set. p_value is the clamped min(2(1 - tail), 1) with
// tail = P(AC_rep > AC_obs) reported raw alongside, and the band is the
// central 95% of replicate ACs.
struct PPCheckCluster {
  int cluster = 0;
  int size = 0;
  double observed_ac = 0.0;
  double p_value = 0.0;
  double raw_tail = 0.0;
  double band_lo = 0.0;
  double band_hi = 0.0;
  std::vector<double> replicate_ac;
};

std::vector<PPCheckCluster> posterior_predictive_check(const Trace& trace,
                                                       const Partition& part,
                                                       const std::vector<Sequence>& data,
                                                       int reps_per_sample,
                                                       const RngStream& rng);

// Posterior predictive density estimate on a grid, averaged over retained
// samples of the per-observation mixture (1/N) sum_i kernel(x | atom_i).
enum class GridTarget { PooledValue, OrderStatistic, LengthPmf };

Eigen::VectorXd predictive_density_grid(const Trace& trace, const Eigen::VectorXd& grid,
                                        GridTarget target, int j = 0);

// Posterior-averaged per-cluster report statistics: for each retained
// sample the cluster's member-averaged atom drives a fresh simulation,
// and OC plus the expected top order statistics pool across samples.
// e_order_js lists the reported ascending indices, n down to max(n-3, 1).
struct ClusterReportStats {
  int cluster = 0;
  OCResult oc;
  std::vector<int> e_order_js;
  std::vector<MCEstimate> e_order;
};

std::vector<ClusterReportStats> cluster_report_stats(const Trace& trace,
                                                     const Partition& part, int n,
                                                     double epsilon, int total_draws,
                                                     const RngStream& rng);

}  // namespace osmix
