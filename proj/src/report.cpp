#include "osmix/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "osmix/random.hpp"

namespace osmix {

using json = nlohmann::ordered_json;

namespace {

// Substream ids of the per-phase split of the user seed.
constexpr std::uint64_t kPhaseSimulate = 10;
constexpr std::uint64_t kPhaseChain = 11;
constexpr std::uint64_t kPhaseAnalytics = 12;
// Within analytics: 0 = cluster report stats, 1 = predictive check.
constexpr std::uint64_t kAnalyticsReport = 0;
constexpr std::uint64_t kAnalyticsPpc = 1;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

int parse_order_stat_target(const std::string& target, int n) {
  const std::string arg = target.substr(11);
  if (arg == "max") return n;
  const int j = std::stoi(arg);
  if (j < 1 || j > n)
    throw std::runtime_error("grid target '" + target + "' out of range for n=" +
                             std::to_string(n));
  return j;
}

void write_trace_csv(const std::string& path, const Trace& trace,
                     const std::vector<std::string>& ids, const MCMCConfig& mcmc) {
  std::ostringstream out;
  out << "iteration,id,cluster,alpha,beta,lambda,w,nu,n_clusters\n";
  for (std::size_t s = 0; s < trace.samples.size(); ++s) {
    const TraceSample& snap = trace.samples[s];
    const int iteration = mcmc.burn_in + static_cast<int>(s + 1) * mcmc.thin;
    for (int i = 0; i < trace.n_obs; ++i) {
      const Atom& a = snap.obs_atoms[static_cast<std::size_t>(i)];
      out << iteration << ',' << ids[static_cast<std::size_t>(i)] << ','
          << snap.assignments[static_cast<std::size_t>(i)] << ','
          << format_double(a.ew.alpha) << ',' << format_double(a.ew.beta) << ','
          << format_double(a.ew.lambda) << ',' << format_double(a.w) << ','
          << format_double(snap.nu) << ',' << snap.n_clusters << "\n";
    }
  }
  write_text_atomic(path, out.str());
}

void write_coincidence_csv(const std::string& path, const Eigen::MatrixXd& rho,
                           const std::vector<std::string>& ids) {
  std::ostringstream out;
  out << "id";
  for (const auto& id : ids) out << ',' << id;
  out << "\n";
  for (int i = 0; i < rho.rows(); ++i) {
    out << ids[static_cast<std::size_t>(i)];
    for (int j = 0; j < rho.cols(); ++j) out << ',' << format_double(rho(i, j));
    out << "\n";
  }
  write_text_atomic(path, out.str());
}

void write_partition_csv(const std::string& path, const Partition& part,
                         const std::vector<std::string>& ids) {
  std::ostringstream out;
  out << "# K=" << format_double(part.k_star) << " score=" << format_double(part.score)
      << "\n";
  out << "id,cluster\n";
  for (std::size_t i = 0; i < ids.size(); ++i)
    out << ids[i] << ',' << part.labels[i] << "\n";
  write_text_atomic(path, out.str());
}

void write_ppc_files(const std::string& out_dir, const std::vector<PPCheckCluster>& ppc) {
  std::ostringstream summary;
  summary << "cluster,size,observed_ac,p_value,raw_tail,band_lo,band_hi\n";
  for (const PPCheckCluster& c : ppc) {
    summary << c.cluster << ',' << c.size << ',' << format_double(c.observed_ac) << ','
            << format_double(c.p_value) << ',' << format_double(c.raw_tail) << ','
            << format_double(c.band_lo) << ',' << format_double(c.band_hi) << "\n";
  }
  write_text_atomic(join_path(out_dir, "pp_check.csv"), summary.str());

  std::ostringstream reps;
  reps << "cluster,replicate,ac\n";
  for (const PPCheckCluster& c : ppc)
    for (std::size_t r = 0; r < c.replicate_ac.size(); ++r)
      reps << c.cluster << ',' << r << ',' << format_double(c.replicate_ac[r]) << "\n";
  write_text_atomic(join_path(out_dir, "pp_check_replicates.csv"), reps.str());
}

void write_density_grids(const std::string& out_dir, const Trace& trace,
                         const Dataset& data, const RunConfig& cfg) {
  double xmax = 0.0;
  for (const DataRow& r : data.rows) xmax = std::max(xmax, r.seq.values[0]);
  const int points = cfg.grid_points;
  Eigen::VectorXd xgrid(points);
  const double width = 1.2 * xmax;
  for (int g = 0; g < points; ++g) xgrid[g] = (g + 0.5) * width / points;

  for (const std::string& target : cfg.grid_targets) {
    std::string file;
    Eigen::VectorXd grid;
    Eigen::VectorXd values;
    std::string value_header = "density";
    if (target == "pooled") {
      file = "density_grid_pooled.csv";
      grid = xgrid;
      values = predictive_density_grid(trace, grid, GridTarget::PooledValue);
    } else if (target == "length") {
      file = "density_grid_length.csv";
      grid.resize(data.n);
      for (int l = 1; l <= data.n; ++l) grid[l - 1] = l;
      values = predictive_density_grid(trace, grid, GridTarget::LengthPmf);
      value_header = "pmf";
    } else {
      const int j = parse_order_stat_target(target, data.n);
      file = "density_grid_order_stat_" + std::to_string(j) + ".csv";
      grid = xgrid;
      values = predictive_density_grid(trace, grid, GridTarget::OrderStatistic, j);
    }
    std::ostringstream out;
    out << (target == "length" ? "l" : "x") << ',' << value_header << "\n";
    for (int g = 0; g < grid.size(); ++g)
      out << format_double(grid[g]) << ',' << format_double(values[g]) << "\n";
    write_text_atomic(join_path(out_dir, file), out.str());
  }
}

json interval_json(double mean, double q025, double q975) {
  json v = json::object();
  v["mean"] = mean;
  v["q025"] = q025;
  v["q975"] = q975;
  return v;
}

void write_summary_json(const std::string& path, const Dataset& data, const RunConfig& cfg,
                        const Trace& trace, const Partition& part,
                        const std::vector<ClusterSummary>& summaries,
                        const std::vector<ClusterReportStats>& stats,
                        const std::vector<PPCheckCluster>& ppc) {
  json doc = json::object();
  doc["n_obs"] = trace.n_obs;
  doc["n"] = data.n;
  doc["retained_samples"] = trace.samples.size();

  json acceptance = json::object();
  acceptance["atoms"] = trace.atom_acceptance.rate();
  acceptance["proposals"] = trace.atom_acceptance.proposals;
  acceptance["accepted"] = trace.atom_acceptance.accepted;
  acceptance["w_out_of_bounds"] = trace.atom_acceptance.w_out_of_bounds;
  doc["acceptance"] = acceptance;

  std::vector<double> nus;
  std::map<int, int> nstar_count;
  double nstar_sum = 0.0;
  for (const TraceSample& s : trace.samples) {
    nus.push_back(s.nu);
    ++nstar_count[s.n_clusters];
    nstar_sum += s.n_clusters;
  }
  int modal_nstar = 0;
  int modal_count = -1;
  for (const auto& [k, c] : nstar_count)
    if (c > modal_count) {
      modal_nstar = k;
      modal_count = c;
    }
  const double nu_mean =
      std::accumulate(nus.begin(), nus.end(), 0.0) / static_cast<double>(nus.size());
  const double nu_lo = empirical_quantile(nus, 0.025);
  const double nu_hi = empirical_quantile(nus, 0.975);
  doc["nu"] = interval_json(nu_mean, nu_lo, nu_hi);
  json nstar = json::object();
  nstar["mode"] = modal_nstar;
  nstar["mean"] = nstar_sum / static_cast<double>(trace.samples.size());
  doc["n_clusters"] = nstar;

  json pj = json::object();
  pj["k_star"] = part.k_star;
  pj["score"] = part.score;
  pj["n_clusters"] = part.n_clusters();
  doc["partition"] = pj;

  const auto seqs = data.sequences();
  std::vector<std::vector<int>> members(static_cast<std::size_t>(part.n_clusters()));
  for (std::size_t i = 0; i < part.labels.size(); ++i)
    members[static_cast<std::size_t>(part.labels[i])].push_back(static_cast<int>(i));

  json clusters = json::array();
  static const char* kParamNames[4] = {"alpha", "beta", "lambda", "w"};
  for (std::size_t c = 0; c < summaries.size(); ++c) {
    const ClusterSummary& cs = summaries[c];
    json cj = json::object();
    cj["cluster"] = cs.cluster;
    cj["size"] = cs.size;
    json params = json::object();
    for (int p = 0; p < 4; ++p)
      params[kParamNames[p]] = interval_json(cs.mean[p], cs.q025[p], cs.q975[p]);
    cj["params"] = params;

    const ClusterReportStats& st = stats[c];
    json oc = json::object();
    oc["value"] = st.oc.value;
    oc["mc_se"] = st.oc.mc_se;
    oc["flagged"] = st.oc.flagged;
    oc["epsilon"] = st.oc.epsilon;
    oc["draws"] = st.oc.draws;
    cj["oc"] = oc;

    std::vector<Sequence> member_seqs;
    for (int i : members[c]) member_seqs.push_back(seqs[static_cast<std::size_t>(i)]);
    cj["ac"] = ac_statistic(member_seqs).value;

    json eos = json::array();
    for (std::size_t q = 0; q < st.e_order_js.size(); ++q) {
      json e = json::object();
      e["j"] = st.e_order_js[q];
      e["value"] = st.e_order[q].value;
      e["mc_se"] = st.e_order[q].mc_se;
      eos.push_back(e);
    }
    cj["expected_order_stats"] = eos;

    const PPCheckCluster& pp = ppc[c];
    json ppj = json::object();
    ppj["observed_ac"] = pp.observed_ac;
    ppj["p_value"] = pp.p_value;
    ppj["raw_tail"] = pp.raw_tail;
    ppj["band_lo"] = pp.band_lo;
    ppj["band_hi"] = pp.band_hi;
    ppj["replicates"] = pp.replicate_ac.size();
    cj["pp_check"] = ppj;

    clusters.push_back(cj);
  }
  doc["clusters"] = clusters;
  doc["config"] = json::parse(config_to_json(cfg));

  write_text_atomic(path, doc.dump(2) + "\n");
}

}  // namespace

void run_simulate_cmd(const std::string& study, const RunConfig& cfg, int n_rows,
                      const std::string& out_dir) {
  std::vector<MixtureComponent> mixture;
  if (study == "study1")
    mixture = study1_mixture();
  else if (study == "study2")
    mixture = study2_mixture();
  else if (study == "custom") {
    if (cfg.custom_components.empty())
      throw std::runtime_error("simulate custom: config must provide simulate.components");
    mixture = cfg.custom_components;
  } else {
    throw std::runtime_error("simulate: unknown study '" + study + "'");
  }
  ensure_dir(out_dir);
  RngStream rng = RngStream(cfg.seed).substream(kPhaseSimulate);
  const SimulatedData sim = simulate_mixture(mixture, n_rows, cfg.n, rng);
  write_dataset_csv(join_path(out_dir, "data.csv"), sim.dataset);
  write_truth_csv(join_path(out_dir, "truth.csv"), sim);
}

void run_fit(const Dataset& data, const RunConfig& cfg, const std::string& out_dir) {
  validate(cfg);
  if (data.rows.empty()) throw std::runtime_error("fit: dataset has no rows");
  ensure_dir(out_dir);

  const RngStream root(cfg.seed);
  const RngStream chain_rng = root.substream(kPhaseChain);
  const RngStream analytics_rng = root.substream(kPhaseAnalytics);

  const auto seqs = data.sequences();
  const Trace trace = run_chain(seqs, cfg.priors, cfg.mcmc, chain_rng);
  const Eigen::MatrixXd rho = coincidence_matrix(trace);
  const Partition part = optimal_partition(rho, cfg.k_grid);
  const auto summaries = clusterwise_summaries(trace, part);
  const auto stats = cluster_report_stats(trace, part, data.n, cfg.epsilon, cfg.oc_draws,
                                          analytics_rng.substream(kAnalyticsReport));
  const auto ppc = posterior_predictive_check(trace, part, seqs, cfg.ppc_reps,
                                              analytics_rng.substream(kAnalyticsPpc));

  const auto ids = data.ids();
  write_trace_csv(join_path(out_dir, "trace.csv"), trace, ids, cfg.mcmc);
  write_coincidence_csv(join_path(out_dir, "coincidence.csv"), rho, ids);
  write_partition_csv(join_path(out_dir, "partition.csv"), part, ids);
  write_ppc_files(out_dir, ppc);
  write_density_grids(out_dir, trace, data, cfg);
  write_summary_json(join_path(out_dir, "summary.json"), data, cfg, trace, part, summaries,
                     stats, ppc);
}

TraceFile read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("trace: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace: empty file " + path);
  const auto header = split_csv_line(line);
  const std::vector<std::string> expect = {"iteration", "id",     "cluster",
                                           "alpha",     "beta",   "lambda",
                                           "w",         "nu",     "n_clusters"};
  if (header != expect)
    throw std::runtime_error("trace: unexpected header in " + path);

  TraceFile out;
  TraceSample cur;
  long cur_iteration = -1;
  bool first_block = true;
  std::size_t row_in_block = 0;
  int line_no = 1;

  auto flush_block = [&]() {
    if (cur.assignments.empty()) return;
    if (!first_block && cur.assignments.size() != out.ids.size())
      throw std::runtime_error("trace: iteration block size mismatch before line " +
                               std::to_string(line_no));
    first_block = false;
    out.trace.samples.push_back(std::move(cur));
    cur = TraceSample();
    row_in_block = 0;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9)
      throw std::runtime_error("trace: line " + std::to_string(line_no) +
                               ": expected 9 fields");
    try {
      const long iteration = std::stol(f[0]);
      if (iteration != cur_iteration) {
        flush_block();
        cur_iteration = iteration;
      }
      if (first_block) {
        out.ids.push_back(f[1]);
      } else {
        if (row_in_block >= out.ids.size() || out.ids[row_in_block] != f[1])
          throw std::runtime_error("id order differs from first iteration block");
      }
      Atom a;
      a.ew.alpha = std::stod(f[3]);
      a.ew.beta = std::stod(f[4]);
      a.ew.lambda = std::stod(f[5]);
      a.w = std::stod(f[6]);
      const double nu = std::stod(f[7]);
      const int n_clusters = std::stoi(f[8]);
      if (row_in_block > 0 && (nu != cur.nu || n_clusters != cur.n_clusters))
        throw std::runtime_error("nu/n_clusters vary within one iteration block");
      ++row_in_block;
      cur.assignments.push_back(std::stoi(f[2]));
      cur.obs_atoms.push_back(a);
      cur.nu = nu;
      cur.n_clusters = n_clusters;
    } catch (const std::exception& e) {
      throw std::runtime_error("trace: line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  flush_block();
  if (out.trace.samples.empty()) throw std::runtime_error("trace: no samples in " + path);
  out.trace.n_obs = static_cast<int>(out.ids.size());
  for (const TraceSample& s : out.trace.samples) {
    int max_cluster = -1;
    for (int c : s.assignments) max_cluster = std::max(max_cluster, c);
    if (max_cluster + 1 != s.n_clusters)
      throw std::runtime_error("trace: n_clusters column disagrees with assignments");
  }
  return out;
}

void run_partition_cmd(const std::string& trace_path, const RunConfig& cfg,
                       const std::string& out_dir) {
  const TraceFile tf = read_trace_csv(trace_path);
  ensure_dir(out_dir);
  const Eigen::MatrixXd rho = coincidence_matrix(tf.trace);
  const Partition part = optimal_partition(rho, cfg.k_grid);
  write_coincidence_csv(join_path(out_dir, "coincidence.csv"), rho, tf.ids);
  write_partition_csv(join_path(out_dir, "partition.csv"), part, tf.ids);
}

void run_diagnose_cmd(const std::string& trace_path, const std::string& out_dir) {
  const TraceFile tf = read_trace_csv(trace_path);
  ensure_dir(out_dir);
  const Trace& trace = tf.trace;
  const int t_count = static_cast<int>(trace.samples.size());
  const int n_obs = trace.n_obs;

  const std::vector<std::string> names = {
      "nu",           "n_clusters",   "alpha_mean",      "beta_mean",
      "lambda_mean",  "w_mean",       "sqrt_alpha_mean", "sqrt_beta_mean",
      "sqrt_lambda_mean"};
  std::vector<std::vector<double>> series(names.size(),
                                          std::vector<double>(static_cast<std::size_t>(t_count)));
  for (int t = 0; t < t_count; ++t) {
    const TraceSample& s = trace.samples[static_cast<std::size_t>(t)];
    double a = 0, b = 0, l = 0, w = 0, sa = 0, sb = 0, sl = 0;
    for (const Atom& atom : s.obs_atoms) {
      a += atom.ew.alpha;
      b += atom.ew.beta;
      l += atom.ew.lambda;
      w += atom.w;
      sa += std::sqrt(atom.ew.alpha);
      sb += std::sqrt(atom.ew.beta);
      sl += std::sqrt(atom.ew.lambda);
    }
    const double inv = 1.0 / n_obs;
    series[0][t] = s.nu;
    series[1][t] = s.n_clusters;
    series[2][t] = a * inv;
    series[3][t] = b * inv;
    series[4][t] = l * inv;
    series[5][t] = w * inv;
    series[6][t] = sa * inv;
    series[7][t] = sb * inv;
    series[8][t] = sl * inv;
  }

  std::ostringstream sout;
  sout << "iteration";
  for (const auto& n : names) sout << ',' << n;
  sout << "\n";
  for (int t = 0; t < t_count; ++t) {
    sout << t;
    for (const auto& col : series) sout << ',' << format_double(col[static_cast<std::size_t>(t)]);
    sout << "\n";
  }
  write_text_atomic(join_path(out_dir, "series.csv"), sout.str());

  constexpr int kMaxLag = 20;
  std::ostringstream dout;
  dout << "series,ess,degenerate";
  for (int k = 1; k <= kMaxLag; ++k) dout << ",acf_" << k;
  dout << "\n";
  for (std::size_t s = 0; s < names.size(); ++s) {
    SeriesDiagnostics diag;
    if (t_count < 2) {
      diag.degenerate = true;
      diag.ess = t_count;
    } else {
      diag = series_diagnostics(series[s], kMaxLag);
    }
    dout << names[s] << ',' << format_double(diag.ess) << ','
         << (diag.degenerate ? "true" : "false");
    for (int k = 1; k <= kMaxLag; ++k) {
      dout << ',';
      if (k <= static_cast<int>(diag.acf.size()))
        dout << format_double(diag.acf[static_cast<std::size_t>(k - 1)]);
    }
    dout << "\n";
  }
  write_text_atomic(join_path(out_dir, "diagnostics.csv"), dout.str());
}

void run_ppcheck_cmd(const std::string& trace_path, const std::string& data_path,
                     const RunConfig& cfg, const std::string& out_dir) {
  TraceFile tf = read_trace_csv(trace_path);
  const IngestResult ingest = ingest_csv(data_path);
  tf.trace.seq_n = ingest.dataset.n;
  ensure_dir(out_dir);
  if (ingest.dataset.rows.size() != tf.ids.size())
    throw std::runtime_error("pp-check: dataset and trace row counts differ");
  for (std::size_t i = 0; i < tf.ids.size(); ++i)
    if (ingest.dataset.rows[i].id != tf.ids[i])
      throw std::runtime_error("pp-check: dataset ids do not match trace ids (row " +
                               std::to_string(i) + ")");

  const Eigen::MatrixXd rho = coincidence_matrix(tf.trace);
  const Partition part = optimal_partition(rho, cfg.k_grid);
  const RngStream ppc_rng =
      RngStream(cfg.seed).substream(kPhaseAnalytics).substream(kAnalyticsPpc);
  const auto ppc = posterior_predictive_check(tf.trace, part, ingest.dataset.sequences(),
                                              cfg.ppc_reps, ppc_rng);
  write_ppc_files(out_dir, ppc);
}

}  // namespace osmix
