#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "osmix/report.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::int64_t seed = -1;  // <0 means "use the config seed"
};

osmix::RunConfig resolve_config(const CommonOpts& opts) {
  osmix::RunConfig cfg = opts.config_path.empty() ? osmix::default_config()
                                                  : osmix::load_config(opts.config_path);
  if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_seed = true) {
  cmd->add_option("--config", opts.config_path, "JSON config file");
  cmd->add_option("--out", opts.out_dir, "output directory");
  if (with_seed)
    cmd->add_option("--seed", opts.seed, "override the config seed (non-negative)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixture modelling of partially observed ranked sequences"};
  app.require_subcommand(0, 1);

  CommonOpts sim_opts;
  std::string study = "study1";
  int n_rows = 500;
  CLI::App* sim = app.add_subcommand("simulate", "draw a synthetic dataset");
  sim->add_option("--study", study, "study1, study2, or custom")
      ->check(CLI::IsMember({"study1", "study2", "custom"}));
  sim->add_option("--n-obs", n_rows, "number of observations")->check(CLI::PositiveNumber);
  add_common(sim, sim_opts);

  CommonOpts fit_opts;
  std::string data_path;
  bool emit_default = false;
  CLI::App* fit = app.add_subcommand("fit", "run the sampler and write all reports");
  fit->add_option("--data", data_path, "input data CSV");
  fit->add_flag("--emit-default-config", emit_default,
                "print the default config JSON and exit");
  add_common(fit, fit_opts);

  CommonOpts part_opts;
  std::string part_trace;
  CLI::App* part = app.add_subcommand("partition", "recompute the partition from a trace");
  part->add_option("--trace", part_trace, "trace.csv from a fit")->required();
  add_common(part, part_opts, false);

  CommonOpts diag_opts;
  std::string diag_trace;
  CLI::App* diag = app.add_subcommand("diagnose", "per-series ESS and autocorrelation");
  diag->add_option("--trace", diag_trace, "trace.csv from a fit")->required();
  add_common(diag, diag_opts, false);

  CommonOpts ppc_opts;
  std::string ppc_trace;
  std::string ppc_data;
  int ppc_reps = -1;
  CLI::App* ppc = app.add_subcommand("pp-check", "posterior predictive AC check");
  ppc->add_option("--trace", ppc_trace, "trace.csv from a fit")->required();
  ppc->add_option("--data", ppc_data, "the data CSV the trace was fit to")->required();
  ppc->add_option("--reps", ppc_reps, "replicates per retained sample")
      ->check(CLI::PositiveNumber);
  add_common(ppc, ppc_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      osmix::run_simulate_cmd(study, resolve_config(sim_opts), n_rows, sim_opts.out_dir);
    } else if (*fit) {
      if (emit_default) {
        std::cout << osmix::config_to_json(osmix::default_config());
        return 0;
      }
      if (data_path.empty())
        throw CLI::RequiredError("--data (or --emit-default-config)");
      const osmix::RunConfig cfg = resolve_config(fit_opts);
      const osmix::IngestResult ingest = osmix::ingest_csv(data_path);
      for (const osmix::IngestWarning& w : ingest.warnings)
        std::cerr << "warning: row '" << w.id << "' (line " << w.line << "): " << w.message
                  << "\n";
      osmix::run_fit(ingest.dataset, cfg, fit_opts.out_dir);
    } else if (*part) {
      osmix::run_partition_cmd(part_trace, resolve_config(part_opts), part_opts.out_dir);
    } else if (*diag) {
      osmix::run_diagnose_cmd(diag_trace, diag_opts.out_dir);
    } else if (*ppc) {
      osmix::RunConfig cfg = resolve_config(ppc_opts);
      if (ppc_reps > 0) cfg.ppc_reps = ppc_reps;
      osmix::run_ppcheck_cmd(ppc_trace, ppc_data, cfg, ppc_opts.out_dir);
    } else {
      std::cout << app.help();
      return 0;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
