#pragma once

#include <string>
#include <vector>

#include "osmix/dpmm.hpp"
#include "osmix/simulate.hpp"

namespace osmix {

// Everything a run needs beyond the data, loadable from a flat JSON
// document with dotted keys (e.g. "priors.alpha1"). Defaults are the
// vague simulation-study priors; preset "retail" swaps in the informative
// retail priors. Explicit keys override the preset.
struct RunConfig {
  Hyperparams priors;
  MCMCConfig mcmc;
  std::uint64_t seed = 1;
  int n = 20;
  double epsilon = 0.05;
  int oc_draws = 100000;
  std::vector<double> k_grid;  // empty means the 0.1..0.9 default
  int ppc_reps = 1;
  int grid_points = 200;
  std::vector<std::string> grid_targets = {"pooled", "order_stat:max", "length"};
  std::vector<MixtureComponent> custom_components;  // for `simulate --study custom`
};

RunConfig default_config();
RunConfig retail_preset();

// Parses the flat-key JSON document. Unknown keys are errors. A "preset"
// key ("vague" or "retail") is applied before everything else.
RunConfig parse_config_json(const std::string& text);
RunConfig load_config(const std::string& path);

// Serializes the full flat-key document, fixed key order, suitable both
// for --emit-default-config and for the summary's config echo.
std::string config_to_json(const RunConfig& cfg);

void validate(const RunConfig& cfg);

}  // namespace osmix
