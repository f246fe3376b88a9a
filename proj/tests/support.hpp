#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "srbf/loss.hpp"
#include "srbf/rbf.hpp"

namespace srbf::test {

inline RbfNetwork random_network(std::mt19937_64& rng, int dim, std::size_t count,
                                 BasisForm form = BasisForm::squared) {
  std::uniform_real_distribution<double> w(-1.0, 1.0), c(0.0, 1.0), d(0.5, 3.0);
  RbfNetwork net(dim, form);
  for (std::size_t i = 0; i < count; ++i) {
    RbfUnit u;
    u.weight = w(rng);
    for (int k = 0; k < dim; ++k) {
      u.center[k] = c(rng);
      u.shape[k] = d(rng);
    }
    net.add(u);
  }
  return net;
}

inline std::vector<double> random_points(std::mt19937_64& rng, int dim, std::size_t count) {
  std::uniform_real_distribution<double> x(0.0, 1.0);
  std::vector<double> out(count * static_cast<std::size_t>(dim));
  for (double& v : out) v = x(rng);
  return out;
}

/// Passes when the values agree to `rel` relatively or to `abs` absolutely.
inline bool close(double got, double want, double rel, double abs) {
  const double diff = std::abs(got - want);
  return diff <= abs || diff <= rel * std::abs(want);
}

}  // namespace srbf::test
