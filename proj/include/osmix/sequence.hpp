#pragma once

#include <Eigen/Core>
#include <string>

#include "osmix/ew.hpp"

namespace osmix {

// One observation: the observed top of a ranked list of n potential entries.
// values holds the l observed entries, descending, so values[0] is the
// largest order statistic x_(n) and values[l-1] is x_(n-l+1). The n - l
// entries below them are censored.
struct Sequence {
  int n = 0;
  Eigen::VectorXd values;

  int l() const { return static_cast<int>(values.size()); }
};

// Mixture component parameters: an EW kernel plus the length-model success
// probability w of l ~ 1 + Binomial(n-1, w).
struct Atom {
  EWParams ew;
  double w = 0.5;
};

// Throws std::invalid_argument with `label` in the message unless
// 1 <= l <= n and values are strictly decreasing and positive.
void validate(const Sequence& seq, const std::string& label = "sequence");

// Throws unless the EW part is valid and 0 < w < 1.
void validate(const Atom& atom);

}  // namespace osmix
