#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace gstlab {

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

struct PcgResult {
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

// Preconditioned conjugate gradients for SPD A; x holds the initial guess.
PcgResult pcg(const LinearMap& A, const LinearMap& M_inv, std::span<const double> b,
              std::span<double> x, double rel_tol, int max_iter);

struct EigenOptions {
  int n_eigen = 2;
  double tol = 1e-9;          // residual / max(1, |lambda|), unit-norm vectors
  int max_basis = 0;          // 0: chosen from n_eigen
  int max_restarts = 60;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

struct EigenResult {
  std::vector<double> values;                 // ascending
  std::vector<std::vector<double>> vectors;   // Euclidean unit norm
  std::vector<double> residuals;              // ||H v - lambda v|| for unit v
  int expansions = 0;
  bool converged = false;
};

// Smallest eigenpairs of a symmetric operator H of dimension n. The search
// space is grown with shift-inverted directions `inverse(q)` ~ (H - s)^{-1} q
// and every extraction is a Rayleigh-Ritz step with H itself, so inexact
// inner solves only slow convergence.
EigenResult smallest_eigenpairs(const LinearMap& H, const LinearMap& inverse, std::size_t n,
                                EigenOptions opts);

}  // namespace gstlab
