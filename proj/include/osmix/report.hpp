#pragma once

#include <string>

#include "osmix/analytics.hpp"
#include "osmix/config.hpp"
#include "osmix/dataset.hpp"
#include "osmix/diagnostics.hpp"

namespace osmix {

// Command implementations behind the CLI verbs. Every function is a pure
// function of (inputs, config, seed); all files go through atomic writes.

// Writes data.csv and truth.csv for the requested study ("study1",
// "study2", or "custom" with components from the config).
void run_simulate_cmd(const std::string& study, const RunConfig& cfg, int n_rows,
                      const std::string& out_dir);

// Full pipeline: chain, coincidence, partition, analytics, reports.
// Writes trace.csv, coincidence.csv, partition.csv, summary.json, and one
// density_grid_*.csv per configured target.
void run_fit(const Dataset& data, const RunConfig& cfg, const std::string& out_dir);

// A trace re-read from trace.csv (observation ids travel separately from
// the numeric samples).
struct TraceFile {
  Trace trace;
  std::vector<std::string> ids;
};

TraceFile read_trace_csv(const std::string& path);

// Recomputes the coincidence matrix and optimal partition from an
// existing trace file.
void run_partition_cmd(const std::string& trace_path, const RunConfig& cfg,
                       const std::string& out_dir);

// Emits plot-ready per-iteration series (nu, cluster count, data-mean
// parameters and their square-root transforms) plus ESS/autocorrelation
// estimates per series.
void run_diagnose_cmd(const std::string& trace_path, const std::string& out_dir);

// Posterior predictive AC check against an existing trace + dataset.
void run_ppcheck_cmd(const std::string& trace_path, const std::string& data_path,
                     const RunConfig& cfg, const std::string& out_dir);

}  // namespace osmix
