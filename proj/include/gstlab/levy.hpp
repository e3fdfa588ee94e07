#pragma once

#include <span>
#include <string>
#include <vector>

#include "gstlab/quadrature.hpp"

namespace gstlab {

enum class ProfileClass { L1, L2, L3, Unsupported };

const char* to_string(ProfileClass c) noexcept;

// f(r) = r^{-d-alpha} on (0,1], exp(-mu r^beta) r^{-gamma} on (1,inf).
// The two pieces need not agree at r = 1.
struct DensityProfile {
  int d = 1;
  double alpha = 1.0;
  double mu = 0.0;
  double beta = 0.0;
  double gamma = 2.0;

  double operator()(double r) const;
  double log_value(double r) const;
  long double log_value_ld(long double log_r) const;  // argument is log r
  // d/dr log f, one-sided (from the right) at r = 1.
  double dlog(double r) const;
  void validate() const;

  bool operator==(const DensityProfile&) const = default;
};

double density_eval(const DensityProfile& p, double r);
ProfileClass classify_profile(const DensityProfile& p);

enum class SymbolForm { Stable, Relativistic, StableDiffusion, GenericFromDensity, Brownian };

const char* to_string(SymbolForm s) noexcept;
SymbolForm symbol_form_from_string(const std::string& s);

// Isotropic Levy model on R^d (d = 1, 2). The diffusion part contributes
// sigma2 |xi|^2 / 2 to the symbol; the jump part is nu(z) = nu_r(|z|).
class LevyModel {
 public:
  static LevyModel stable(int d, double alpha);
  static LevyModel stable_with_diffusion(int d, double alpha, double sigma2);
  // psi = (|xi|^2 + m^{2/alpha})^{alpha/2} - m.
  static LevyModel relativistic(int d, double alpha, double mass);
  static LevyModel brownian(int d, double sigma2);
  static LevyModel from_density(const DensityProfile& p, double sigma2 = 0.0,
                                double jump_scale = 1.0);

  SymbolForm symbol_form() const { return form_; }
  double diffusion_coeff() const { return sigma2_; }
  const DensityProfile& density_profile() const { return profile_; }
  int dim() const { return profile_.d; }
  double mass() const { return mass_; }
  double jump_scale() const { return scale_; }
  bool has_jumps() const { return form_ != SymbolForm::Brownian; }

  // psi as a function of |xi|.
  double symbol(double xi_norm) const;
  // Radial Levy density nu_r(r), r > 0; zero for the brownian form.
  double levy_density(double r) const;
  // int_{|z| < eps} |z|^2 nu(z) dz / d  (per-coordinate second moment).
  double small_jump_variance(double eps) const;
  // nu({|z| >= eps}).
  double jump_intensity(double eps) const;

  bool operator==(const LevyModel&) const = default;

 private:
  SymbolForm form_ = SymbolForm::Brownian;
  double sigma2_ = 0.0;
  double mass_ = 0.0;
  double scale_ = 1.0;
  DensityProfile profile_{};
  double stable_norm_ = 1.0;  // c_{d,alpha}
};

double symbol_eval(const LevyModel& model, std::span<const double> xi);

// c_{d,alpha} with int (1 - cos(xi.z)) c |z|^{-d-alpha} dz = |xi|^alpha.
double stable_constant(int d, double alpha);

struct JumpParingReport {
  std::vector<double> radii;
  std::vector<double> ratios;
  std::vector<bool> passes;
  double worst_ratio = 0.0;
  double cap = 0.0;
  bool bounded = false;
};

// Ratio of int_{|y|>1/2, |x-y|>1/2} f(|x-y|) f(|y|) dy to f(|x|).
double jump_paring_ratio(const DensityProfile& p, double r,
                         quad::Tolerance tol = {1e-8, 1e-6});

JumpParingReport check_jump_paring(const DensityProfile& p, std::span<const double> r_grid,
                                   double cap = 100.0);

}  // namespace gstlab
