#include "osmix/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace osmix {

using json = nlohmann::ordered_json;

namespace {

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) throw std::runtime_error("config: '" + key + "' must be a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer())
    throw std::runtime_error("config: '" + key + "' must be an integer");
  return v.get<int>();
}

std::uint64_t as_u64(const json& v, const std::string& key) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw std::runtime_error("config: '" + key + "' must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

MixtureComponent parse_component(const json& v) {
  if (!v.is_object())
    throw std::runtime_error("config: each simulate.components entry must be an object");
  MixtureComponent c{};
  const std::string kind = v.at("kernel").get<std::string>();
  if (kind == "ew") {
    c.kernel = EWParams{as_double(v.at("alpha"), "alpha"), as_double(v.at("beta"), "beta"),
                        as_double(v.at("lambda"), "lambda")};
  } else if (kind == "gamma") {
    c.kernel = GammaKernel{as_double(v.at("shape"), "shape"), as_double(v.at("rate"), "rate")};
  } else {
    throw std::runtime_error("config: component kernel must be 'ew' or 'gamma'");
  }
  c.w = as_double(v.at("w"), "w");
  c.weight = as_double(v.at("weight"), "weight");
  return c;
}

json component_to_json(const MixtureComponent& c) {
  json v = json::object();
  if (const EWParams* ew = std::get_if<EWParams>(&c.kernel)) {
    v["kernel"] = "ew";
    v["alpha"] = ew->alpha;
    v["beta"] = ew->beta;
    v["lambda"] = ew->lambda;
  } else {
    const GammaKernel& g = std::get<GammaKernel>(c.kernel);
    v["kernel"] = "gamma";
    v["shape"] = g.shape;
    v["rate"] = g.rate;
  }
  v["w"] = c.w;
  v["weight"] = c.weight;
  return v;
}

void assign_key(RunConfig& cfg, const std::string& key, const json& v) {
  if (key == "seed")
    cfg.seed = as_u64(v, key);
  else if (key == "n")
    cfg.n = as_int(v, key);
  else if (key == "epsilon")
    cfg.epsilon = as_double(v, key);
  else if (key == "oc_draws")
    cfg.oc_draws = as_int(v, key);
  else if (key == "priors.a")
    cfg.priors.a = as_double(v, key);
  else if (key == "priors.b")
    cfg.priors.b = as_double(v, key);
  else if (key == "priors.alpha1")
    cfg.priors.alpha1 = as_double(v, key);
  else if (key == "priors.alpha2")
    cfg.priors.alpha2 = as_double(v, key);
  else if (key == "priors.beta1")
    cfg.priors.beta1 = as_double(v, key);
  else if (key == "priors.beta2")
    cfg.priors.beta2 = as_double(v, key);
  else if (key == "priors.lambda1")
    cfg.priors.lambda1 = as_double(v, key);
  else if (key == "priors.lambda2")
    cfg.priors.lambda2 = as_double(v, key);
  else if (key == "priors.tau1")
    cfg.priors.tau1 = as_double(v, key);
  else if (key == "priors.tau2")
    cfg.priors.tau2 = as_double(v, key);
  else if (key == "mcmc.iterations")
    cfg.mcmc.iterations = as_int(v, key);
  else if (key == "mcmc.burn_in")
    cfg.mcmc.burn_in = as_int(v, key);
  else if (key == "mcmc.thin")
    cfg.mcmc.thin = as_int(v, key);
  else if (key == "mcmc.aux_count")
    cfg.mcmc.aux_count = as_int(v, key);
  else if (key == "mcmc.mh_inner")
    cfg.mcmc.mh_inner = as_int(v, key);
  else if (key == "mcmc.step_alpha")
    cfg.mcmc.step_sizes.alpha = as_double(v, key);
  else if (key == "mcmc.step_beta")
    cfg.mcmc.step_sizes.beta = as_double(v, key);
  else if (key == "mcmc.step_lambda")
    cfg.mcmc.step_sizes.lambda = as_double(v, key);
  else if (key == "mcmc.step_w")
    cfg.mcmc.step_sizes.w = as_double(v, key);
  else if (key == "partition.k_grid") {
    if (!v.is_array()) throw std::runtime_error("config: 'partition.k_grid' must be an array");
    cfg.k_grid.clear();
    for (const auto& e : v) cfg.k_grid.push_back(as_double(e, key));
  } else if (key == "ppc.reps_per_sample")
    cfg.ppc_reps = as_int(v, key);
  else if (key == "grids.points")
    cfg.grid_points = as_int(v, key);
  else if (key == "grids.targets") {
    if (!v.is_array()) throw std::runtime_error("config: 'grids.targets' must be an array");
    cfg.grid_targets.clear();
    for (const auto& e : v) cfg.grid_targets.push_back(e.get<std::string>());
  } else if (key == "simulate.components") {
    if (!v.is_array())
      throw std::runtime_error("config: 'simulate.components' must be an array");
    cfg.custom_components.clear();
    for (const auto& e : v) cfg.custom_components.push_back(parse_component(e));
  } else {
    throw std::runtime_error("config: unknown key '" + key + "'");
  }
}

}  // namespace

RunConfig default_config() {
  RunConfig cfg;
  for (int i = 1; i <= 9; ++i) cfg.k_grid.push_back(i / 10.0);
  return cfg;
}

RunConfig retail_preset() {
  RunConfig cfg = default_config();
  cfg.priors.a = 2.0;
  cfg.priors.b = 3.0;
  cfg.priors.alpha1 = 7.0;
  cfg.priors.alpha2 = 0.7;
  cfg.priors.beta1 = 0.5;
  cfg.priors.beta2 = 1.0;
  cfg.priors.lambda1 = 1.0;
  cfg.priors.lambda2 = 1.0;
  cfg.priors.tau1 = 5.0;
  cfg.priors.tau2 = 1.0;
  cfg.n = 10;
  return cfg;
}

RunConfig parse_config_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::runtime_error("config: top level must be a JSON object");

  RunConfig cfg = default_config();
  if (doc.contains("preset")) {
    const std::string p = doc["preset"].get<std::string>();
    if (p == "retail")
      cfg = retail_preset();
    else if (p != "vague")
      throw std::runtime_error("config: unknown preset '" + p + "'");
  }
  for (const auto& [key, value] : doc.items()) {
    if (key == "preset") continue;
    assign_key(cfg, key, value);
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

std::string config_to_json(const RunConfig& cfg) {
  json doc = json::object();
  doc["seed"] = cfg.seed;
  doc["n"] = cfg.n;
  doc["epsilon"] = cfg.epsilon;
  doc["oc_draws"] = cfg.oc_draws;
  doc["priors.a"] = cfg.priors.a;
  doc["priors.b"] = cfg.priors.b;
  doc["priors.alpha1"] = cfg.priors.alpha1;
  doc["priors.alpha2"] = cfg.priors.alpha2;
  doc["priors.beta1"] = cfg.priors.beta1;
  doc["priors.beta2"] = cfg.priors.beta2;
  doc["priors.lambda1"] = cfg.priors.lambda1;
  doc["priors.lambda2"] = cfg.priors.lambda2;
  doc["priors.tau1"] = cfg.priors.tau1;
  doc["priors.tau2"] = cfg.priors.tau2;
  doc["mcmc.iterations"] = cfg.mcmc.iterations;
  doc["mcmc.burn_in"] = cfg.mcmc.burn_in;
  doc["mcmc.thin"] = cfg.mcmc.thin;
  doc["mcmc.aux_count"] = cfg.mcmc.aux_count;
  doc["mcmc.mh_inner"] = cfg.mcmc.mh_inner;
  doc["mcmc.step_alpha"] = cfg.mcmc.step_sizes.alpha;
  doc["mcmc.step_beta"] = cfg.mcmc.step_sizes.beta;
  doc["mcmc.step_lambda"] = cfg.mcmc.step_sizes.lambda;
  doc["mcmc.step_w"] = cfg.mcmc.step_sizes.w;
  doc["partition.k_grid"] = cfg.k_grid;
  doc["ppc.reps_per_sample"] = cfg.ppc_reps;
  doc["grids.points"] = cfg.grid_points;
  doc["grids.targets"] = cfg.grid_targets;
  if (!cfg.custom_components.empty()) {
    json arr = json::array();
    for (const auto& c : cfg.custom_components) arr.push_back(component_to_json(c));
    doc["simulate.components"] = arr;
  }
  return doc.dump(2) + "\n";
}

void validate(const RunConfig& cfg) {
  validate(cfg.priors);
  validate(cfg.mcmc);
  if (cfg.n < 1) throw std::invalid_argument("config: n must be >= 1");
  if (!(cfg.epsilon >= 0.0)) throw std::invalid_argument("config: epsilon must be >= 0");
  if (cfg.oc_draws < 1000) throw std::invalid_argument("config: oc_draws must be >= 1000");
  for (double k : cfg.k_grid)
    if (!(k >= 0.0 && k <= 1.0))
      throw std::invalid_argument("config: partition.k_grid entries must be in [0,1]");
  if (cfg.ppc_reps < 1) throw std::invalid_argument("config: ppc.reps_per_sample must be >= 1");
  if (cfg.grid_points < 2) throw std::invalid_argument("config: grids.points must be >= 2");
  for (const std::string& t : cfg.grid_targets) {
    if (t == "pooled" || t == "length") continue;
    if (t.rfind("order_stat:", 0) == 0) {
      const std::string arg = t.substr(11);
      if (arg == "max") continue;
      try {
        const int j = std::stoi(arg);
        if (j >= 1 && j <= cfg.n) continue;
      } catch (...) {
      }
      throw std::invalid_argument("config: bad order_stat target '" + t + "'");
    }
    throw std::invalid_argument("config: unknown grid target '" + t + "'");
  }
}

}  // namespace osmix
