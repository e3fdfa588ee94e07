#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace gstlab {

enum class PotentialFamily {
  Polynomial,
  DoubleWell,
  ExpPolyLog,
  Well,
  Coulomb,
  Yukawa,
  PoschlTeller,
  Morse,
  Custom,
};

enum class PotentialKind { Confining, Decaying };

const char* to_string(PotentialFamily f) noexcept;
const char* to_string(PotentialKind k) noexcept;
PotentialFamily potential_family_from_string(const std::string& s);

// Potentials of the catalog are radial, V(x) = g(|x|), except `custom`
// (an arbitrary function of x in d = 1).
//
//   polynomial    coeff |x|^{2n} + shift                      (coeff > 0)
//   double_well   |x|^4 - b |x|^2
//   exp_poly_log  e^{eta r^vartheta} r^rho log(1+r)^sigma
//   well          -depth on |x| <= radius, 0 outside
//   coulomb       -charge / sqrt(|x|^2 + soft^2)
//   yukawa        -charge e^{-screening |x|} / sqrt(|x|^2 + soft^2)
//   poschl_teller -a / cosh^2(b |x|)
//   morse         a ((1 - e^{-b(|x| - r0)})^2 - 1)
class Potential {
 public:
  static Potential polynomial(int n, double coeff = 1.0, double shift = 0.0);
  // V = gamma^2 x^2 / 2 - gamma / 2: ground state of the OU example with lambda0 = 0.
  static Potential ornstein_uhlenbeck(double gamma);
  static Potential double_well(double b);
  static Potential exp_poly_log(double eta, double vartheta, double rho, double sigma);
  static Potential well(double depth, double radius);
  static Potential coulomb(double charge, double soft = 1.0);
  static Potential yukawa(double charge, double screening, double soft = 1.0);
  static Potential poschl_teller(double a, double b);
  static Potential morse(double a, double b, double r0);
  static Potential custom(std::function<double(double)> v, PotentialKind kind,
                          std::string label = "custom");
  // Family + named parameters, as stored in configs.
  static Potential from_params(PotentialFamily family, const std::map<std::string, double>& p);

  PotentialFamily family() const { return family_; }
  PotentialKind kind() const { return kind_; }
  bool is_radial() const { return family_ != PotentialFamily::Custom; }
  // Named parameters of the family (empty for custom).
  std::map<std::string, double> params() const;
  const std::string& label() const { return label_; }

  double operator()(std::span<const double> x) const;
  double at(double x) const;        // d = 1
  double radial(double r) const;    // g(r); radial families only
  // Radii where the family is piecewise smooth (cell averaging and profiles).
  std::vector<double> kinks() const;
  // True when g is singular or discontinuous (grid sampling averages cells).
  bool needs_cell_average() const;

  // inf and sup of g over the radius interval [lo, hi].
  std::pair<double, double> radial_extrema(double lo, double hi) const;
  // log(1 v V_up) and log(1 v V_low) at radius e^L, finite for huge L.
  long double log1v_up(long double L) const;
  long double log1v_low(long double L) const;
  // Radius beyond which V_up <= 1 and V_low <= 1, so g_up = g_low = 1.
  // Infinity for confining families, NaN when unknown (custom).
  double radius_beyond_which_flat() const;

 private:
  long double log1v_at(long double L) const;
  PotentialFamily family_ = PotentialFamily::Polynomial;
  PotentialKind kind_ = PotentialKind::Confining;
  std::string label_;
  int n_ = 1;
  double p1_ = 0, p2_ = 0, p3_ = 0, p4_ = 0;
  std::function<double(double)> custom_;
};

double potential_eval(const Potential& V, std::span<const double> x);

struct UnitBallEnvelope {
  double v_up = 0.0;
  double v_low = 0.0;
};

// Closed form for radial families; sampled (low-discrepancy) otherwise.
UnitBallEnvelope unit_ball_envelope(const Potential& V, std::span<const double> x,
                                    int samples = 64);
// Always sampled: Halton points in the ball plus center and radial extremes.
UnitBallEnvelope sampled_envelope(const Potential& V, std::span<const double> x,
                                  int samples = 64);

struct AlmostConstantReport {
  double max_ratio = 0.0;  // sup of (1 v V_up)/(1 v V_low) over the test ray
  double threshold = 4.0;
  bool holds = false;
};

// (1 v V_up)/(1 v V_low) on radii [10, r_max] along the positive axis.
AlmostConstantReport almost_constant_diagnostic(const Potential& V, int d, double r_max = 1e3);

struct GProfiles {
  double g_up = 1.0;
  double g_low = 1.0;
};

GProfiles g_profiles(const Potential& V, double r, int d);
// log g_up, log g_low at radius e^L (radial families, and custom in d = 1).
std::pair<long double, long double> log_g_profiles(const Potential& V, long double L, int d);

}  // namespace gstlab
