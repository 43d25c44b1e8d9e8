#pragma once

#include <Eigen/Core>
#include <vector>

#include "osmix/dpmm.hpp"

namespace osmix {

// Hard clustering selected from the posterior: canonical labels (numbered
// by first appearance), the grid value K_star attaining the best linear
// loss, and that score.
struct Partition {
  std::vector<int> labels;
  double k_star = 0.0;
  double score = 0.0;

  int n_clusters() const;
};

// Relabels in place so cluster ids appear in increasing order of first
// appearance (0, 1, 2, ...).
void canonicalize_labels(std::vector<int>& labels);

// rho[i][j] = fraction of retained iterations assigning i and j to the
// same cluster. Symmetric, unit diagonal.
Eigen::MatrixXd coincidence_matrix(const Trace& trace);

// Linear-loss objective: sum over pairs i < j in the same cluster of
// (rho[i][j] - K). Maximizing this trades co-membership evidence against
// the penalty K per within-cluster pair.
double partition_score(const std::vector<int>& labels, const Eigen::MatrixXd& rho,
                       double k);

// Maximizes partition_score over a K grid (default 0.1..0.9 by 0.1) with a
// deterministic local search per K: best-improvement merges and
// single-element moves, run from the all-singletons start plus 10
// internally seeded random starts. Ties break toward smaller K, then
// lexicographically smaller canonical labels.
Partition optimal_partition(const Eigen::MatrixXd& rho,
                            const std::vector<double>& k_grid = {});

// Member-averaged atom per retained iteration for one partition cluster:
// row t holds the cluster's (alpha, beta, lambda, w) average at sample t.
std::vector<Eigen::MatrixX4d> clusterwise_iteration_means(const Trace& trace,
                                                          const Partition& part);

// Posterior mean and central 95% interval of the per-iteration cluster
// averages, one entry per cluster of the partition.
struct ClusterSummary {
  int cluster = 0;
  int size = 0;
  Eigen::Vector4d mean;
  Eigen::Vector4d q025;
  Eigen::Vector4d q975;
};

std::vector<ClusterSummary> clusterwise_summaries(const Trace& trace,
                                                  const Partition& part);

// Empirical quantile with linear interpolation between order statistics
// (the convention used for every reported interval).
double empirical_quantile(std::vector<double> values, double p);

}  // namespace osmix
