#include "osmix/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "osmix/orderstats.hpp"
#include "osmix/random.hpp"

namespace osmix {

std::vector<MixtureComponent> study1_mixture() {
  return {
      {EWParams{0.15, 0.8, 0.91}, 0.65, 0.4},
      {EWParams{2.5, 3.3, 0.35}, 0.75, 0.35},
      {EWParams{0.64, 1.7, 0.4}, 0.9, 0.25},
  };
}

std::vector<MixtureComponent> study2_mixture() {
  return {
      {GammaKernel{0.15, 0.5}, 0.65, 0.4},
      {GammaKernel{1.7, 1.0}, 0.75, 0.35},
      {GammaKernel{32.0, 10.0}, 0.9, 0.25},
  };
}

namespace {

void validate_mixture(const std::vector<MixtureComponent>& mixture) {
  if (mixture.empty()) throw std::invalid_argument("simulate_mixture: no components");
  double total = 0.0;
  for (const MixtureComponent& c : mixture) {
    if (!(c.weight > 0.0)) throw std::invalid_argument("simulate_mixture: weight must be > 0");
    if (!(c.w > 0.0 && c.w < 1.0))
      throw std::invalid_argument("simulate_mixture: component w must be in (0,1)");
    if (const EWParams* ew = std::get_if<EWParams>(&c.kernel)) {
      validate(*ew);
    } else {
      const GammaKernel& g = std::get<GammaKernel>(c.kernel);
      if (!(g.shape > 0.0 && g.rate > 0.0))
        throw std::invalid_argument("simulate_mixture: gamma kernel needs shape, rate > 0");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-6)
    throw std::invalid_argument("simulate_mixture: component weights must sum to 1");
}

double kernel_draw(RngStream& rng, const MixtureComponent& c) {
  if (const EWParams* ew = std::get_if<EWParams>(&c.kernel)) return ew_sample(rng, *ew);
  const GammaKernel& g = std::get<GammaKernel>(c.kernel);
  return gamma_sample(rng, g.shape, g.rate);
}

}  // namespace

SimulatedData simulate_mixture(const std::vector<MixtureComponent>& mixture, int N,
                               int n, RngStream& rng) {
  validate_mixture(mixture);
  if (N < 1 || n < 1) throw std::invalid_argument("simulate_mixture: need N >= 1, n >= 1");

  int id_width = 1;
  for (int v = N; v >= 10; v /= 10) ++id_width;
  id_width = std::max(id_width, 4);

  SimulatedData sim;
  sim.mixture = mixture;
  sim.dataset.n = n;
  sim.dataset.rows.reserve(static_cast<std::size_t>(N));
  sim.components.reserve(static_cast<std::size_t>(N));

  std::vector<double> draws(static_cast<std::size_t>(n));
  for (int i = 0; i < N; ++i) {
    // Per row: one component uniform, n-1 length trials, n kernel values.
    const double u = rng.next_double();
    int comp = 0;
    double acc = 0.0;
    for (std::size_t c = 0; c < mixture.size(); ++c) {
      acc += mixture[c].weight;
      if (u < acc) {
        comp = static_cast<int>(c);
        break;
      }
      comp = static_cast<int>(c);
    }
    const int l = 1 + binomial_sample(rng, n - 1, mixture[comp].w);
    for (auto& d : draws) d = kernel_draw(rng, mixture[comp]);
    std::sort(draws.begin(), draws.end(), std::greater<double>());

    DataRow row;
    std::ostringstream id;
    id << 's';
    std::string digits = std::to_string(i + 1);
    id << std::string(static_cast<std::size_t>(id_width) - digits.size(), '0') << digits;
    row.id = id.str();
    row.seq.n = n;
    row.seq.values = Eigen::Map<const Eigen::VectorXd>(draws.data(), l);
    sim.dataset.rows.push_back(std::move(row));
    sim.components.push_back(comp);
  }
  return sim;
}

void write_truth_csv(const std::string& path, const SimulatedData& sim) {
  std::ostringstream out;
  out << "id,component,kernel,param1,param2,param3,w\n";
  for (std::size_t i = 0; i < sim.dataset.rows.size(); ++i) {
    const MixtureComponent& c = sim.mixture[static_cast<std::size_t>(sim.components[i])];
    out << sim.dataset.rows[i].id << ',' << sim.components[i] << ',';
    if (const EWParams* ew = std::get_if<EWParams>(&c.kernel)) {
      out << "ew," << format_double(ew->alpha) << ',' << format_double(ew->beta) << ','
          << format_double(ew->lambda);
    } else {
      const GammaKernel& g = std::get<GammaKernel>(c.kernel);
      out << "gamma," << format_double(g.shape) << ',' << format_double(g.rate) << ',';
    }
    out << ',' << format_double(c.w) << "\n";
  }
  write_text_atomic(path, out.str());
}

}  // namespace osmix
