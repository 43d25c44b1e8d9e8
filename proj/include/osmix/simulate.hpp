#pragma once

#include <variant>
#include <vector>

#include "osmix/dataset.hpp"
#include "osmix/rng.hpp"

namespace osmix {

// Shape-rate Gamma kernel, used by the robustness study whose data do not
// come from the fitted family.
struct GammaKernel {
  double shape;
  double rate;
};

struct MixtureComponent {
  std::variant<EWParams, GammaKernel> kernel;
  double w;
  double weight;
};

// The two built-in generating mixtures: three components with weights
// (0.4, 0.35, 0.25); EW kernels for study 1, Gamma kernels for study 2.
std::vector<MixtureComponent> study1_mixture();
std::vector<MixtureComponent> study2_mixture();

struct SimulatedData {
  Dataset dataset;
  std::vector<int> components;  // generating component per row
  std::vector<MixtureComponent> mixture;
};

// Draws N observations: component index, l = 1 + Binomial(n-1, w), n iid
// kernel values sorted descending with the top l kept. Row ids are s0001,
// s0002, ... (width grows with N).
SimulatedData simulate_mixture(const std::vector<MixtureComponent>& mixture, int N,
                               int n, RngStream& rng);

// Ground-truth companion file: id, component, kernel type, parameters, w.
void write_truth_csv(const std::string& path, const SimulatedData& sim);

}  // namespace osmix
