#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "gstlab/levy.hpp"
#include "gstlab/potentials.hpp"
#include "gstlab/spectral.hpp"

namespace gstlab {

// Every consumer renormalises phi0 (and the other modes) to unit L2 mass on
// the grid first, so rescaling a stored solution changes no output.

struct IntrinsicKernel {
  double t = 0.0;
  std::vector<std::size_t> nodes;  // flat grid indices of the window
  Eigen::MatrixXd u;               // u~(t, x_i, x_j), symmetric
  std::vector<double> weights;     // phi0^2(x_j) h^d on the window
  // max_i |sum_y u~(t, x_i, y) phi0^2(y) h^d - 1| with y over the whole grid.
  double normalization_defect = 0.0;
  // Largest stationary mass a row loses outside the window.
  double window_leak = 0.0;
  int clamped = 0;
  double truncation_estimate = 0.0;
};

// u~ = e^{lambda0 t} u / (phi0 x phi0) from the first m_modes eigenpairs.
// Throws Normalization when the defect exceeds max_defect.
IntrinsicKernel intrinsic_kernel(const SpectralSolution& sol, double t, int m_modes,
                                 double window_fraction = 1e-4, double max_defect = 1e-4);

// max over window pairs of |u~(2t) - (u~(t) composed with itself under
// phi0^2 h^d over the whole grid)| / max(1, u~(2t)).
double chapman_kolmogorov_defect(const SpectralSolution& sol, double t, int m_modes,
                                 double window_fraction = 1e-4);

struct StationaryDensity {
  Grid grid;
  std::vector<double> density;  // per unit volume
  std::vector<double> mass;     // density * h^d, sums to 1
};

StationaryDensity stationary_density(const SpectralSolution& sol);

// Log-linear interpolation of the normalised phi0 (d = 1). Outside the grid
// log phi0 continues with the end slope, never increasing outward.
class Phi0Interpolant {
 public:
  explicit Phi0Interpolant(const SpectralSolution& sol);
  double log_value(double x) const;
  double value(double x) const;
  // log phi0(x + z) - log phi0(x), free of cancellation for small |z|.
  double log_increment(double x, double z) const;
  // Node derivatives are central differences, linearly interpolated.
  double dlog(double x) const;
  double certified_radius() const { return r_cert_; }
  const Grid& grid() const { return grid_; }
  // h^2/8 * max |(log phi0)''| over the certified window.
  double interpolation_error_bound() const { return err_bound_; }
  const std::vector<double>& log_nodes() const { return logphi_; }

 private:
  Grid grid_;
  std::vector<double> logphi_;
  std::vector<double> dlog_;
  double r_cert_ = 0.0;
  double err_bound_ = 0.0;
};

// Drift and jump bias of the transformed process (d = 1).
class GstFields {
 public:
  GstFields(const SpectralSolution& sol, const LevyModel& model);

  // sigma2 (log phi0)' + int_{|z|<=1} z (phi0(x+z)/phi0(x) - 1) nu(z) dz.
  // Throws OutsideWindow beyond the certified radius.
  double drift(double x) const;
  // phi0(x+z)/phi0(x) on the interpolant.
  double bias(double x, double z) const;
  double log_bias(double x, double z) const;

  // Jumps below eps_jump are folded into the diffusion: the simulated
  // dynamics use (sigma2 + s_eps)(log phi0)' and variance sigma2 + s_eps.
  double eps_jump() const { return eps_; }
  double effective_sigma2() const { return sigma2_eff_; }
  double sde_drift(double x) const;

  const Phi0Interpolant& phi0() const { return phi_; }
  const LevyModel& model() const { return model_; }

 private:
  Phi0Interpolant phi_;
  LevyModel model_;
  double eps_ = 0.0;
  double sigma2_eff_ = 0.0;
};

GstFields gst_fields(const SpectralSolution& sol, const LevyModel& model);

struct SandwichOptions {
  double r_min = 2.0;          // inner edge of the window
  double slope_from = 0.25;    // slope fit on [slope_from * r_max, r_max]
  double epsilon = 0.1;        // decaying regime (3)
};

struct SandwichReport {
  std::string regime;          // confining | decaying
  double r_min = 0.0, r_max = 0.0;
  std::vector<double> radii;
  std::vector<double> phi0;
  std::vector<double> ratio_up;   // phi0 (1 v V_up) / (1 ^ nu)   (confining)
  std::vector<double> ratio_low;  // phi0 (1 v V_low) / (1 ^ nu)  (decaying: phi0 / (1 ^ nu))
  double min_up = 0.0, max_up = 0.0, min_low = 0.0, max_low = 0.0;
  double slope = 0.0;             // log phi0 against log r
  double exp_rate = 0.0;          // -d log phi0 / dr, decaying case
  double theta_fit = 0.0;         // exp_rate / sqrt(|lambda0| + epsilon)
  double epsilon = 0.0;

  double spread_up() const { return max_up / min_up; }
  double spread_low() const { return max_low / min_low; }
};

SandwichReport sandwich_check(const SpectralSolution& sol, const LevyModel& model,
                              const Potential& V, const SandwichOptions& opts = {});

struct ComparisonReport {
  std::vector<double> scales;       // c0, 2c0, 4c0
  std::vector<double> min_ratio;    // per scale
  std::vector<double> tail_slope;   // d log ratio / d log r on the outer half
  double r_lo = 0.0, r_hi = 0.0;
  bool condition_holds = false;
};

// phi0^(1)(c x) / phi0^(2)(x) over the common certified window (d = 1).
ComparisonReport compare_ground_states(const SpectralSolution& sol1, const SpectralSolution& sol2,
                                       double c0, double r_lo = 1.0);

}  // namespace gstlab
