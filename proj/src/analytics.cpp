#include "osmix/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "osmix/orderstats.hpp"
#include "osmix/random.hpp"

namespace osmix {

namespace {

struct RunningMoments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t count = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++count;
  }
  double mean() const { return sum / static_cast<double>(count); }
  double se() const {
    const double n = static_cast<double>(count);
    const double var = std::max(0.0, sum_sq / n - mean() * mean());
    return std::sqrt(var / n);
  }
};

// One generative draw shared by OC and the order-statistic expectations:
// ascending sorted values plus the drawn length.
void draw_sorted(RngStream& rng, const Atom& atom, int n, std::vector<double>& buf,
                 int& length) {
  length = 1 + binomial_sample(rng, n - 1, atom.w);
  buf.resize(static_cast<std::size_t>(n));
  for (auto& v : buf) v = ew_sample(rng, atom.ew);
  std::sort(buf.begin(), buf.end());
}

}  // namespace

OCResult oc_statistic(const Atom& atom, int n, double epsilon, int draws, RngStream& rng) {
  validate(atom);
  if (n < 1) throw std::invalid_argument("oc_statistic: n must be >= 1");
  if (draws < 1000) throw std::invalid_argument("oc_statistic: need at least 1000 draws");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("oc_statistic: epsilon must be >= 0");
  RunningMoments m;
  std::vector<double> buf;
  int length = 0;
  for (int d = 0; d < draws; ++d) {
    draw_sorted(rng, atom, n, buf, length);
    m.add(length == n ? 0.0 : buf[static_cast<std::size_t>(n - length - 1)]);
  }
  OCResult out;
  out.value = m.mean();
  out.mc_se = m.se();
  out.epsilon = epsilon;
  out.draws = draws;
  out.flagged = out.value >= epsilon;
  return out;
}

ACResult ac_statistic(const std::vector<Sequence>& sequences) {
  if (sequences.empty()) throw std::invalid_argument("ac_statistic: empty input");
  ACResult out;
  out.per_observation.reserve(sequences.size());
  for (const Sequence& s : sequences) out.per_observation.push_back(s.values.sum());
  double total = 0.0;
  for (double v : out.per_observation) total += v;
  out.value = total / static_cast<double>(out.per_observation.size());
  return out;
}

MCEstimate expected_order_statistic(const EWParams& p, int j, int n, int draws,
                                    RngStream& rng) {
  validate(p);
  if (n < 1 || j < 1 || j > n)
    throw std::invalid_argument("expected_order_statistic: need 1 <= j <= n");
  if (draws < 1) throw std::invalid_argument("expected_order_statistic: draws must be >= 1");
  RunningMoments m;
  std::vector<double> buf(static_cast<std::size_t>(n));
  for (int d = 0; d < draws; ++d) {
    for (auto& v : buf) v = ew_sample(rng, p);
    std::sort(buf.begin(), buf.end());
    m.add(buf[static_cast<std::size_t>(j - 1)]);
  }
  return {m.mean(), m.se()};
}

std::vector<PPCheckCluster> posterior_predictive_check(const Trace& trace,
                                                       const Partition& part,
                                                       const std::vector<Sequence>& data,
                                                       int reps_per_sample,
                                                       const RngStream& rng) {
  const int n_obs = trace.n_obs;
  if (static_cast<int>(part.labels.size()) != n_obs ||
      static_cast<int>(data.size()) != n_obs)
    throw std::invalid_argument("posterior_predictive_check: size mismatch");
  if (trace.samples.empty())
    throw std::invalid_argument("posterior_predictive_check: empty trace");
  if (reps_per_sample < 1)
    throw std::invalid_argument("posterior_predictive_check: reps_per_sample must be >= 1");

  const int m = part.n_clusters();
  const int t_count = static_cast<int>(trace.samples.size());
  std::vector<std::vector<int>> members(static_cast<std::size_t>(m));
  for (int i = 0; i < n_obs; ++i) members[part.labels[i]].push_back(i);

  std::vector<PPCheckCluster> out(static_cast<std::size_t>(m));
  for (int c = 0; c < m; ++c) {
    out[c].cluster = c;
    out[c].size = static_cast<int>(members[c].size());
    std::vector<Sequence> obs;
    obs.reserve(members[c].size());
    for (int i : members[c]) obs.push_back(data[i]);
    out[c].observed_ac = ac_statistic(obs).value;
    out[c].replicate_ac.reserve(static_cast<std::size_t>(t_count) * reps_per_sample);
  }

  for (int t = 0; t < t_count; ++t) {
    const TraceSample& s = trace.samples[t];
    for (int r = 0; r < reps_per_sample; ++r) {
      std::vector<double> sums(static_cast<std::size_t>(m), 0.0);
      for (int c = 0; c < m; ++c) {
        for (int i : members[c]) {
          // Substream id fixed by (sample, rep, observation): replicates
          // are independent of member enumeration order.
          const std::uint64_t id =
              (static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(reps_per_sample) +
               static_cast<std::uint64_t>(r)) *
                  static_cast<std::uint64_t>(n_obs) +
              static_cast<std::uint64_t>(i);
          RngStream obs_rng = rng.substream(id);
          const Sequence rep = sample_sequence(obs_rng, s.obs_atoms[i], data[i].n);
          sums[c] += rep.values.sum();
        }
        out[c].replicate_ac.push_back(sums[c] /
                                      static_cast<double>(members[c].size()));
      }
    }
  }

  for (int c = 0; c < m; ++c) {
    PPCheckCluster& pc = out[c];
    std::int64_t above = 0;
    for (double v : pc.replicate_ac)
      if (v > pc.observed_ac) ++above;
    pc.raw_tail = static_cast<double>(above) / static_cast<double>(pc.replicate_ac.size());
    pc.p_value = std::min(2.0 * (1.0 - pc.raw_tail), 1.0);
    pc.band_lo = empirical_quantile(pc.replicate_ac, 0.025);
    pc.band_hi = empirical_quantile(pc.replicate_ac, 0.975);
  }
  return out;
}

Eigen::VectorXd predictive_density_grid(const Trace& trace, const Eigen::VectorXd& grid,
                                        GridTarget target, int j) {
  if (trace.samples.empty())
    throw std::invalid_argument("predictive_density_grid: empty trace");
  if (grid.size() == 0) throw std::invalid_argument("predictive_density_grid: empty grid");
  const int n = trace.seq_n;
  if (target == GridTarget::OrderStatistic && (j < 1 || j > n))
    throw std::invalid_argument("predictive_density_grid: order statistic j out of range");
  if (target == GridTarget::LengthPmf) {
    for (int g = 0; g < grid.size(); ++g) {
      const double v = grid[g];
      if (std::abs(v - std::round(v)) > 1e-9 || v < 1.0 || v > n)
        throw std::invalid_argument(
            "predictive_density_grid: length grid must hold integers in [1, n]");
    }
  } else {
    for (int g = 0; g < grid.size(); ++g)
      if (!(grid[g] > 0.0))
        throw std::invalid_argument("predictive_density_grid: grid values must be > 0");
  }

  const int n_obs = trace.n_obs;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(grid.size());
  for (const TraceSample& s : trace.samples) {
    for (int i = 0; i < n_obs; ++i) {
      const Atom& a = s.obs_atoms[i];
      for (int g = 0; g < grid.size(); ++g) {
        double v = 0.0;
        switch (target) {
          case GridTarget::PooledValue:
            v = ew_pdf(grid[g], a.ew);
            break;
          case GridTarget::OrderStatistic:
            v = order_stat_marginal_pdf(grid[g], j, n, a.ew);
            break;
          case GridTarget::LengthPmf:
            v = std::exp(length_log_pmf(static_cast<int>(std::lround(grid[g])), n, a.w));
            break;
        }
        acc[g] += v;
      }
    }
  }
  return acc / (static_cast<double>(trace.samples.size()) * n_obs);
}

std::vector<ClusterReportStats> cluster_report_stats(const Trace& trace,
                                                     const Partition& part, int n,
                                                     double epsilon, int total_draws,
                                                     const RngStream& rng) {
  if (trace.samples.empty()) throw std::invalid_argument("cluster_report_stats: empty trace");
  if (n < 1) throw std::invalid_argument("cluster_report_stats: n must be >= 1");
  if (total_draws < 1000)
    throw std::invalid_argument("cluster_report_stats: need at least 1000 draws");
  const auto series = clusterwise_iteration_means(trace, part);
  const int t_count = static_cast<int>(trace.samples.size());
  const int per_iter = std::max(1, total_draws / t_count);

  std::vector<int> js;
  for (int j = n; j >= 1 && static_cast<int>(js.size()) < 4; --j) js.push_back(j);

  std::vector<ClusterReportStats> out;
  out.reserve(series.size());
  for (std::size_t c = 0; c < series.size(); ++c) {
    RunningMoments oc_m;
    std::vector<RunningMoments> order_m(js.size());
    std::vector<double> buf;
    int length = 0;
    for (int t = 0; t < t_count; ++t) {
      Atom atom;
      atom.ew.alpha = series[c](t, 0);
      atom.ew.beta = series[c](t, 1);
      atom.ew.lambda = series[c](t, 2);
      atom.w = series[c](t, 3);
      RngStream iter_rng =
          rng.substream(c * static_cast<std::uint64_t>(t_count) + static_cast<std::uint64_t>(t));
      for (int d = 0; d < per_iter; ++d) {
        draw_sorted(iter_rng, atom, n, buf, length);
        oc_m.add(length == n ? 0.0 : buf[static_cast<std::size_t>(n - length - 1)]);
        for (std::size_t q = 0; q < js.size(); ++q)
          order_m[q].add(buf[static_cast<std::size_t>(js[q] - 1)]);
      }
    }
    ClusterReportStats stats;
    stats.cluster = static_cast<int>(c);
    stats.oc.value = oc_m.mean();
    stats.oc.mc_se = oc_m.se();
    stats.oc.epsilon = epsilon;
    stats.oc.draws = static_cast<int>(oc_m.count);
    stats.oc.flagged = stats.oc.value >= epsilon;
    stats.e_order_js = js;
    for (const auto& m : order_m) stats.e_order.push_back({m.mean(), m.se()});
    out.push_back(std::move(stats));
  }
  return out;
}

}  // namespace osmix
