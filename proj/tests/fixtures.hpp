#pragma once
// Solutions shared across test files; each is solved once per process.
#include <cmath>

#include "gstlab/levy.hpp"
#include "gstlab/potentials.hpp"
#include "gstlab/spectral.hpp"

namespace gstlab::testing {

inline const SpectralSolution& ou_solution() {
  static const SpectralSolution sol = [] {
    SolveOptions o;
    o.n_modes = 40;
    return solve(LevyModel::brownian(1, 1.0), Potential::ornstein_uhlenbeck(1.0), Grid{1, 12.0, 1024}, o);
  }();
  return sol;
}

// alpha = 1 stable with V = x^2, no domain expansion.
inline const SpectralSolution& stable_solution() {
  static const SpectralSolution sol = [] {
    SolveOptions o;
    o.n_modes = 30;
    o.auto_expand = false;
    return solve(LevyModel::stable(1, 1.0), Potential::polynomial(1), Grid{1, 100.0, 4096}, o);
  }();
  return sol;
}

inline const SpectralSolution& well_solution() {
  static const SpectralSolution sol =
      solve(LevyModel::brownian(1, 1.0), Potential::well(1.0, 1.0), Grid{1, 20.0, 2048});
  return sol;
}

inline double ou_phi0(double x, double gamma = 1.0) {
  return std::pow(gamma / M_PI, 0.25) * std::exp(-0.5 * gamma * x * x);
}

}  // namespace gstlab::testing
