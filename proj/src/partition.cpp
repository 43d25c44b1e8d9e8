#include "osmix/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace osmix {

namespace {

// Fixed internal seed: optimal_partition is a pure function of rho.
constexpr std::uint64_t kSearchSeed = 0x70617274697469ULL;
constexpr double kImproveTol = 1e-11;

// Incremental state for the linear-loss local search. S(i,t) caches
// sum over members j of cluster t of (rho(i,j) - K), including j = i
// when i sits in t; all move and merge deltas read off it in O(1)/O(|A|).
class SearchState {
 public:
  SearchState(const Eigen::MatrixXd& rho, double k, std::vector<int> labels)
      : rho_(rho), k_(k), labels_(std::move(labels)), n_(static_cast<int>(rho.rows())) {
    m_ = 1 + *std::max_element(labels_.begin(), labels_.end());
    counts_.assign(static_cast<std::size_t>(m_), 0);
    for (int c : labels_) ++counts_[c];
    s_ = Eigen::MatrixXd::Zero(n_, n_);
    for (int j = 0; j < n_; ++j)
      for (int i = 0; i < n_; ++i) s_(i, labels_[j]) += rho_(i, j) - k_;
  }

  // One best-improvement step over all single-element moves (including
  // moves out to a fresh singleton) and all pairwise merges. Returns
  // false at a local optimum.
  bool step() {
    double best_delta = kImproveTol;
    int best_i = -1, best_to = -1;     // element move; to == m_ means new cluster
    int best_a = -1, best_b = -1;      // merge

    for (int i = 0; i < n_; ++i) {
      const int from = labels_[i];
      if (counts_[from] == 1 && m_ == 1) continue;
      const double detach = -s_(i, from) + (1.0 - k_);
      for (int t = 0; t <= m_; ++t) {
        if (t == from) continue;
        if (t == m_ && counts_[from] == 1) continue;  // singleton to singleton is a no-op
        const double delta = detach + (t < m_ ? s_(i, t) : 0.0);
        if (delta > best_delta) {
          best_delta = delta;
          best_i = i;
          best_to = t;
          best_a = -1;
        }
      }
    }

    if (m_ > 1) {
      Eigen::MatrixXd pair = Eigen::MatrixXd::Zero(m_, m_);
      for (int i = 0; i < n_; ++i) pair.row(labels_[i]) += s_.row(i).head(m_);
      for (int a = 0; a < m_; ++a)
        for (int b = a + 1; b < m_; ++b)
          if (pair(a, b) > best_delta) {
            best_delta = pair(a, b);
            best_a = a;
            best_b = b;
            best_i = -1;
          }
    }

    if (best_i < 0 && best_a < 0) return false;
    if (best_i >= 0)
      apply_move(best_i, best_to);
    else
      apply_merge(best_a, best_b);
    return true;
  }

  const std::vector<int>& labels() const { return labels_; }

 private:
  void apply_move(int i, int to) {
    const int from = labels_[i];
    if (to == m_) {
      counts_.push_back(0);
      s_.col(m_).setZero();
      ++m_;
    }
    labels_[i] = to;
    --counts_[from];
    ++counts_[to];
    for (int j = 0; j < n_; ++j) {
      const double v = rho_(j, i) - k_;
      s_(j, from) -= v;
      s_(j, to) += v;
    }
    if (counts_[from] == 0) drop_cluster(from);
  }

  void apply_merge(int a, int b) {
    s_.col(a) += s_.col(b);
    counts_[a] += counts_[b];
    for (int& c : labels_)
      if (c == b) c = a;
    counts_[b] = 0;
    drop_cluster(b);
  }

  void drop_cluster(int c) {
    const int last = m_ - 1;
    if (c != last) {
      s_.col(c) = s_.col(last);
      counts_[c] = counts_[last];
      for (int& l : labels_)
        if (l == last) l = c;
    }
    counts_.pop_back();
    --m_;
  }

  const Eigen::MatrixXd& rho_;
  double k_;
  std::vector<int> labels_;
  int n_;
  int m_;
  std::vector<int> counts_;
  Eigen::MatrixXd s_;
};

std::vector<int> random_labels(int n, RngStream& rng) {
  const int cap = std::min<int>(n, 25);
  const int m = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(cap));
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    labels[i] = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(m));
  canonicalize_labels(labels);
  return labels;
}

}  // namespace

int Partition::n_clusters() const {
  if (labels.empty()) return 0;
  return 1 + *std::max_element(labels.begin(), labels.end());
}

void canonicalize_labels(std::vector<int>& labels) {
  std::unordered_map<int, int> remap;
  int next = 0;
  for (int& c : labels) {
    auto [it, inserted] = remap.emplace(c, next);
    if (inserted) ++next;
    c = it->second;
  }
}

Eigen::MatrixXd coincidence_matrix(const Trace& trace) {
  if (trace.samples.empty())
    throw std::invalid_argument("coincidence_matrix: trace has no retained samples");
  const int n = trace.n_obs;
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n, n);
  for (const TraceSample& s : trace.samples) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (s.assignments[i] == s.assignments[j]) counts(i, j) += 1.0;
  }
  Eigen::MatrixXd rho = counts / static_cast<double>(trace.samples.size());
  rho = rho + Eigen::MatrixXd(rho.transpose());
  rho.diagonal().setOnes();
  return rho;
}

double partition_score(const std::vector<int>& labels, const Eigen::MatrixXd& rho,
                       double k) {
  const int n = static_cast<int>(labels.size());
  if (rho.rows() != n || rho.cols() != n)
    throw std::invalid_argument("partition_score: labels/rho size mismatch");
  if (!(k >= 0.0 && k <= 1.0))
    throw std::invalid_argument("partition_score: K must be in [0,1]");
  double score = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (labels[i] == labels[j]) score += rho(i, j) - k;
  return score;
}

Partition optimal_partition(const Eigen::MatrixXd& rho, const std::vector<double>& k_grid) {
  const int n = static_cast<int>(rho.rows());
  if (n < 1 || rho.cols() != n)
    throw std::invalid_argument("optimal_partition: rho must be square and nonempty");
  std::vector<double> grid = k_grid;
  if (grid.empty())
    for (int i = 1; i <= 9; ++i) grid.push_back(i / 10.0);
  std::sort(grid.begin(), grid.end());

  const RngStream base(kSearchSeed);
  Partition best;
  bool have_best = false;

  for (std::size_t ki = 0; ki < grid.size(); ++ki) {
    const double k = grid[ki];
    std::vector<int> k_labels;
    double k_score = 0.0;
    bool have_k = false;
    for (int r = 0; r < 11; ++r) {
      std::vector<int> start;
      if (r == 0) {
        start.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) start[i] = i;
      } else {
        RngStream rr = base.substream(ki * 64 + static_cast<std::uint64_t>(r));
        start = random_labels(n, rr);
      }
      SearchState search(rho, k, std::move(start));
      // Hard cap against float-drift cycles; never binding in practice.
      for (int steps = 0; steps < 50 * n + 1000 && search.step(); ++steps) {
      }
      std::vector<int> labels = search.labels();
      canonicalize_labels(labels);
      const double score = partition_score(labels, rho, k);
      if (!have_k || score > k_score || (score == k_score && labels < k_labels)) {
        have_k = true;
        k_score = score;
        k_labels = std::move(labels);
      }
    }
    // Strict > keeps the smallest K on exact score ties (grid is ascending).
    if (!have_best || k_score > best.score) {
      have_best = true;
      best.labels = std::move(k_labels);
      best.k_star = k;
      best.score = k_score;
    }
  }
  return best;
}

std::vector<Eigen::MatrixX4d> clusterwise_iteration_means(const Trace& trace,
                                                          const Partition& part) {
  const int n = trace.n_obs;
  if (static_cast<int>(part.labels.size()) != n)
    throw std::invalid_argument("clusterwise_iteration_means: partition/trace size mismatch");
  const int t_count = static_cast<int>(trace.samples.size());
  const int m = part.n_clusters();
  std::vector<std::vector<int>> members(static_cast<std::size_t>(m));
  for (int i = 0; i < n; ++i) members[part.labels[i]].push_back(i);

  std::vector<Eigen::MatrixX4d> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int c = 0; c < m; ++c) {
    Eigen::MatrixX4d series(t_count, 4);
    for (int t = 0; t < t_count; ++t) {
      Eigen::Vector4d acc = Eigen::Vector4d::Zero();
      for (int i : members[c]) {
        const Atom& a = trace.samples[t].obs_atoms[i];
        acc += Eigen::Vector4d(a.ew.alpha, a.ew.beta, a.ew.lambda, a.w);
      }
      series.row(t) = (acc / static_cast<double>(members[c].size())).transpose();
    }
    out.push_back(std::move(series));
  }
  return out;
}

std::vector<ClusterSummary> clusterwise_summaries(const Trace& trace, const Partition& part) {
  const auto series = clusterwise_iteration_means(trace, part);
  std::vector<int> sizes(series.size(), 0);
  for (int c : part.labels) ++sizes[c];

  std::vector<ClusterSummary> out;
  out.reserve(series.size());
  for (std::size_t c = 0; c < series.size(); ++c) {
    ClusterSummary s;
    s.cluster = static_cast<int>(c);
    s.size = sizes[c];
    s.mean = series[c].colwise().mean().transpose();
    for (int p = 0; p < 4; ++p) {
      std::vector<double> col(series[c].col(p).data(),
                              series[c].col(p).data() + series[c].rows());
      s.q025[p] = empirical_quantile(col, 0.025);
      s.q975[p] = empirical_quantile(std::move(col), 0.975);
    }
    out.push_back(s);
  }
  return out;
}

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("empirical_quantile: empty input");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("empirical_quantile: p must be in [0,1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

}  // namespace osmix
