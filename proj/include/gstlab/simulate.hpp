#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "gstlab/gst.hpp"
#include "gstlab/spectral.hpp"

namespace gstlab {

// Identical spec => identical stream. Streams with different ids are
// decorrelated through a seed sequence.
struct RngSpec {
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;

  RngSpec derive(std::uint64_t index) const;
  std::mt19937_64 engine() const;
};

struct JumpRecord {
  double time = 0.0;
  double x = 0.0;  // pre-jump state
  double z = 0.0;
  bool accepted = false;
};

struct GstPath {
  int d = 1;
  std::vector<double> times;
  std::vector<double> states;  // times.size() * d
  std::vector<JumpRecord> jump_log;
  long long clamp_count = 0;
  double max_abs_state = 0.0;
  long long proposals = 0;
  long long accepted = 0;

  std::size_t size() const { return times.size(); }
  double state(std::size_t i, int k = 0) const { return states[i * d + k]; }
};

// n iid draws from phi0^2 on the grid: a cell is chosen by inverse CDF
// (conditional inverse CDF in d = 2) and the point is uniform in the cell.
// Returns n * d coordinates.
std::vector<double> sample_stationary(const SpectralSolution& sol, std::size_t n, const RngSpec& rng);

// Discrete-time chain on the kernel window with transition probabilities
// proportional to u~(t, x, y) phi0^2(y) h^d (rows renormalised to the window).
class KernelChain {
 public:
  KernelChain(const IntrinsicKernel& kernel, const Grid& grid);
  std::size_t window_size() const { return nodes_.size(); }
  // Window index of the node nearest to x (which must lie in the window).
  std::size_t window_index(double x) const;
  double position(std::size_t w) const;
  // Window stationary masses (phi0^2 h^d renormalised on the window).
  const std::vector<double>& stationary_mass() const { return mass_; }
  std::size_t sample_stationary_index(std::mt19937_64& eng) const;
  std::size_t step(std::size_t w, std::mt19937_64& eng) const;
  GstPath run(double x0, long long n_steps, const RngSpec& rng) const;
  double time_step() const { return t_; }

 private:
  double t_ = 0.0;
  Grid grid_;
  std::vector<std::size_t> nodes_;
  std::vector<double> mass_, mass_cdf_;
  std::vector<double> cdf_;  // row-major cumulative rows
};

GstPath simulate_chain(const IntrinsicKernel& kernel, const Grid& grid, double x0, long long n_steps,
                       const RngSpec& rng);

// N(r) = int_r^inf nu_r(s) ds in d = 1 (one side), tabulated in log-log
// form, with its inverse.
class JumpTail {
 public:
  JumpTail(const LevyModel& model, double r_min, double r_max);
  double tail(double r) const;          // N(r); 0 at infinity
  double inverse(double n) const;       // r with N(r) = n
  // mass of distances in [a, b] (b may be infinite)
  double mass(double a, double b) const { return tail(a) - tail(b); }

 private:
  std::vector<double> logr_, logn_;
};

struct SdeOptions {
  double record_every = 1.0;   // skeleton spacing (integer times by default)
  bool log_jumps = false;
  int block = 32;              // nodes per majorant block
  double dt_factor = 10.0;     // max |drift| dt <= dt_factor * h
};

// Euler scheme for the jump SDE of the transformed process (d = 1): drift
// and folded diffusion from `fields`, jumps |z| >= eps_jump from nu tilted by
// phi0(x+z)/phi0(x), sampled by thinning against a block-wise majorant.
class SdeSampler {
 public:
  SdeSampler(const GstFields& fields, double dt, const SdeOptions& opts = {});
  GstPath run(double x0, double T, const RngSpec& rng) const;
  double dt() const { return dt_; }
  double dt_max() const { return dt_max_; }
  double certified_radius() const { return r_cert_; }

 private:
  struct Block {
    double lo, hi;        // interval (may be infinite)
    double log_max;       // max log phi0 on the interval
    double log_min;       // min log phi0 on the interval (source bound)
    double width;
  };
  int block_of(double x) const;
  double exact_mass(double x, const Block& b) const;
  double sample_in_block(double x, const Block& b, std::mt19937_64& eng) const;

  GstFields fields_;
  double dt_ = 0.0;
  double dt_max_ = 0.0;
  double r_cert_ = 0.0;
  double eps_ = 0.0;
  SdeOptions opts_;
  std::vector<Block> blocks_;
  std::vector<double> qcdf_;   // per source block, cumulative majorant rates
  std::vector<double> qtot_;
  std::shared_ptr<const JumpTail> tail_;
};

GstPath simulate_sde(const GstFields& fields, double x0, double dt, double T, const RngSpec& rng,
                     const SdeOptions& opts = {});

// Runs f(i) for i in [0, count) on `threads` workers.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& f);

// Kolmogorov-Smirnov helpers.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
double ks_two_sample(std::vector<double> a, std::vector<double> b);
// Discrete target: samples are atom indices, mass the atom probabilities.
double ks_discrete(const std::vector<std::size_t>& samples, const std::vector<double>& mass);
// 1% critical value of the one-sample statistic, 1.628 / sqrt(n).
double ks_critical_1pct(std::size_t n);
double ks_critical_two_sample_1pct(std::size_t n, std::size_t m);

// CDF of the piecewise-constant grid density phi0^2 (d = 1).
std::function<double(double)> grid_cdf(const SpectralSolution& sol);

}  // namespace gstlab
