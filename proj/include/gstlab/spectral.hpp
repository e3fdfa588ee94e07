#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gstlab/levy.hpp"
#include "gstlab/potentials.hpp"

namespace gstlab {

// Cell-centred periodic grid: nodes -R + (j + 1/2) h, h = 2R/n, per axis.
// The node set is symmetric about 0 and never contains 0.
struct Grid {
  int d = 1;
  double half_width = 10.0;
  int n = 256;

  double spacing() const { return 2.0 * half_width / n; }
  double node(int j) const { return -half_width + (j + 0.5) * spacing(); }
  std::size_t size() const { return d == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n; }
  double cell_volume() const { return d == 1 ? spacing() : spacing() * spacing(); }
  // Position of flat index i (row-major in 2-d: i = j0 * n + j1).
  void position(std::size_t i, double* x) const;
  double radius(std::size_t i) const;
  void validate() const;

  bool operator==(const Grid&) const = default;
};

// H = -L + V discretised as a Fourier multiplier plus a diagonal.
class Operator {
 public:
  Operator(const LevyModel& model, const Potential& V, const Grid& grid);

  const Grid& grid() const;
  const LevyModel& model() const;
  const Potential& potential() const;
  std::span<const double> potential_values() const;
  // psi at the r2c frequency layout (n/2+1 in 1-d, n*(n/2+1) in 2-d).
  std::span<const double> multiplier() const;
  std::uint64_t model_hash() const;

  void apply(std::span<const double> in, std::span<double> out) const;
  void apply_kinetic(std::span<const double> in, std::span<double> out) const;
  // out = F^{-1} diag(m) F in, for any multiplier in the r2c layout.
  void apply_multiplier(std::span<const double> m, std::span<const double> in,
                        std::span<double> out) const;

  // Explicit matrix from cosine sums (independent of the FFT path); d = 1.
  Eigen::MatrixXd dense_matrix() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

Operator build_operator(const LevyModel& model, const Potential& V, const Grid& grid);

struct SpectralSolution {
  Grid grid;
  std::vector<double> phi0;                    // > 0, sum phi0^2 h^d = 1
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  std::vector<double> eigenvalues;             // all computed, ascending
  std::vector<std::vector<double>> modes;      // same normalisation as phi0; modes[0] = phi0
  double residual = 0.0;                       // ||H phi0 - lambda0 phi0|| / max(1,|lambda0|)
  double boundary_ratio = 0.0;                 // max boundary |phi0| / max phi0
  double noise_floor = 0.0;                    // relative to max phi0
  int sign_fixed_nodes = 0;
  std::uint64_t model_hash = 0;

  double gap() const { return lambda1 - lambda0; }
  double max_phi0() const;
  // Largest radius r such that phi0 > 1e3 * max(boundary value, noise floor)
  // at every node with |x| <= r.
  double certified_radius() const;
};

struct SolveOptions {
  int n_modes = 2;
  double tol = 1e-9;
  bool auto_expand = true;
  double boundary_target = 1e-10;
  int max_n = 1 << 16;
  double gap_tol = 1e-8;
  std::uint64_t seed = 0x5eedULL;
};

SpectralSolution ground_state(const Operator& op, const SolveOptions& opts = {});

// Solves for the ground state, doubling R (and n, keeping h) until the
// boundary ratio meets the target for confining potentials.
SpectralSolution solve(const LevyModel& model, const Potential& V, Grid grid,
                       const SolveOptions& opts = {});

// All eigenpairs of the dense matrix (ascending), columns normalised like phi0.
struct DenseSpectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};
DenseSpectrum dense_spectrum(const Operator& op);

// Smallest lambda0 of the 1-d finite well -v 1_{|x|<=a} with psi = |xi|^2/2.
double well_eigenvalue(double a, double v);

struct KernelMatrix {
  double t = 0.0;
  std::vector<std::size_t> nodes;  // flat grid indices of the kernel window
  Eigen::MatrixXd u;               // u(t, x_i, x_j) on the window
  int clamped = 0;                 // negative entries set to zero
  double truncation_estimate = 0.0;
};

// u(t,x,y) = sum_{k<m} e^{-lambda_k t} phi_k(x) phi_k(y) on the nodes where
// phi0 >= window_fraction * max phi0.
KernelMatrix fk_kernel(const SpectralSolution& sol, double t, int m_modes,
                       double window_fraction = 1e-6, double truncation_tol = 1e-6);

// Binary artifact: magic, JSON header, raw arrays, trailing FNV-1a 64 hash.
// `meta` is a JSON object copied into the header (config hash, seed, ...).
void save_solution(const SpectralSolution& sol, const std::string& path,
                   const std::string& meta = "{}");
SpectralSolution load_solution(const std::string& path);
std::uint64_t solution_content_hash(const SpectralSolution& sol);

// v / sqrt(sum v^2 h^d).
std::vector<double> normalized_mode(const std::vector<double>& v, double cell_volume);

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace gstlab
