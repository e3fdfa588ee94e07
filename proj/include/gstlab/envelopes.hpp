#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gstlab/levy.hpp"
#include "gstlab/potentials.hpp"
#include "gstlab/spectral.hpp"

namespace gstlab {

// log g(r) as a function of log r. Everything that may be evaluated at
// astronomically large radii is written this way.
using LogFn = std::function<long double(long double)>;

enum class ProfileFamily { IteratedLogPower, LogPower, CustomMonotone };

const char* to_string(ProfileFamily f) noexcept;

// Test function tau(r), non-decreasing and positive on [r_min, inf).
class ProfileFunction {
 public:
  // (r (log r)^{2 theta_1 + 1} ... (log_k r)^{2 theta_k + delta})^{1/(2 gamma' - d)},
  // k = theta.size() >= 1, log_i the i-fold logarithm.
  static ProfileFunction iterated_log_power(double gamma_prime, int d, std::vector<double> theta,
                                            double delta);
  // scale * (log r)^{1/lambda} L*(log r); L* is supplied in log form
  // (log L*(t) as a function of log t).
  static ProfileFunction log_power(double lambda, LogFn log_lstar, double scale = 1.0,
                                   std::string lstar_label = "1");
  // scale * (log r)^{1/lambda}.
  static ProfileFunction log_power(double lambda, double scale = 1.0);
  static ProfileFunction custom(LogFn log_tau, long double log_r_min, std::string label);

  // log tau at r = e^{log_r}.
  long double log_value(long double log_r) const;
  double operator()(double r) const;
  // Smallest log r at which the profile is defined and used.
  long double log_r_min() const { return log_r_min_; }
  ProfileFamily family() const { return family_; }
  const std::string& label() const { return label_; }
  nlohmann::ordered_json describe() const;

 private:
  ProfileFamily family_ = ProfileFamily::CustomMonotone;
  LogFn log_tau_;
  long double log_r_min_ = 1.0L;
  std::string label_;
  nlohmann::ordered_json params_;
};

// Parses {"family": ..., ...}; errors name the missing field.
ProfileFunction profile_from_json(const nlohmann::ordered_json& j, const std::string& path = "profile");

// R(r) = r^lambda L(r).
struct RegVarFunction {
  double lambda = 1.0;
  LogFn log_L = [](long double) { return 0.0L; };

  long double log_value(long double log_r) const { return lambda * log_r + log_L(log_r); }
  double operator()(double r) const;
};

struct IndexCheck {
  std::vector<double> log_radii;
  std::vector<double> dev2, dev10;  // |log(R(sr)/R(r)) - lambda log s|
  bool holds = false;
};

// Checks R(sr)/R(r) -> s^lambda for s in {2, 10} on r = 10^1 ... 10^max_decade.
IndexCheck check_index(const RegVarFunction& R, double max_decade = 300.0);

// log R*(t) with R*(t) = inf{s >= r0 : R(s) >= t}, by monotone bisection in
// log s. Argument is log t.
long double asymptotic_inverse_log(const RegVarFunction& R, long double log_t,
                                   long double log_r0 = 0.0L);

struct ConjugateResult {
  bool closed_form = false;
  std::string warning;
  LogFn log_Lstar;                     // log L*(t) as a function of log t
  std::vector<double> log_radii;       // where the technical condition was checked
  std::vector<double> condition_dev;   // |log L(r) - log L(r / L(r)^{1/lambda})|
};

// L* = L(t^{1/lambda})^{-1/lambda} when L(r) ~ L(r / L(r)^{1/lambda}) holds on
// the grid; otherwise the numeric asymptotic inverse of r^lambda L(r).
ConjugateResult conjugate_slowly_varying(const LogFn& log_L, double lambda);

// Non-decreasing positive kappa with derivative; log form for huge radii.
struct KappaFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  LogFn log_value;
  std::string label;

  static KappaFunction constant(double c = 1.0);
  static KappaFunction power(double p);
  // r^{beta v vartheta} when (mu, beta > 0) or (eta, vartheta > 0), else 1.
  static KappaFunction standard(const DensityProfile& f, double eta, double vartheta);
};

struct TailBoundOptions {
  int points = 200;          // geometric grid on [r_lo, r_hi]
  double extend = 1e3;       // conditions are also checked up to extend * r_hi
  double fd_step = 1e-5;     // relative finite-difference step
  double rel_tol = 1e-6;     // slack on the conclusion inequalities
};

struct TailBoundRow {
  double r = 0.0;
  double tail = 0.0;         // int_{s>r} h(s) s^{d-1} ds by quadrature
  double bound_low = 0.0;    // h r^d / ((A1 + B1) kappa), a lower bound under (L)
  double bound_up = 0.0;     // h r^d / ((A2 + B2) kappa), an upper bound under (U)
};

struct TailBoundReport {
  bool pre_decay = false;       // h(r) r^d -> 0
  bool pre_integrable = false;  // h r^{d-1} integrable at infinity
  bool pre_smooth = false;      // one-sided differences agree
  std::vector<std::string> failures;
  bool L_holds = false, U_holds = false;
  double A1 = 0, B1 = 0, A2 = 0, B2 = 0;
  bool conclusion_low_ok = false;  // tail >= bound_low wherever L holds
  bool conclusion_up_ok = false;   // tail <= bound_up wherever U holds
  double worst_low = 0.0;          // max bound_low / tail
  double worst_up = 0.0;           // max tail / bound_up
  std::vector<TailBoundRow> rows;

  bool conclusion_ok() const { return conclusion_low_ok && conclusion_up_ok; }
};

// log_h evaluates log h(r); derivatives are taken by central differences.
TailBoundReport tail_bound_check(const std::function<double(double)>& log_h, const KappaFunction& kappa,
                                 int d, double r_lo, double r_hi, const TailBoundOptions& opts = {});

enum class Verdict { Finite, Divergent, Inconclusive };

const char* to_string(Verdict v) noexcept;

struct ClassifierOptions {
  double tail_fraction = 1e-8;   // finite when the tail bound is below this share
  double window_ratio = 0.5;     // divergence needs consecutive ratios above this
  int divergent_windows = 6;
  int confirm_windows = 2;       // consecutive windows passing the tail test
  int power_windows = 4;         // consecutive windows of a steady power law p > 1
  double power_tol = 0.02;       // y^{-p} with p <= 1 + power_tol is non-integrable
  double flat_rate = 1e-6;       // |b| y below this counts as no exponential rate
  long double y_cap = 1e18L;     // give up (inconclusive) past this
};

struct WindowRecord {
  long double y_lo = 0, y_hi = 0;
  long double log_mass = 0;      // log of the window integral
  double ratio = 0.0;            // mass / previous mass
  double p = 0.0, b = 0.0;       // fitted log F ~ a - b y - p log y
};

struct IntegralClassification {
  Verdict verdict = Verdict::Inconclusive;
  long double log_accumulated = 0;   // log of the partial integral
  long double log_tail_bound = 0;    // log of the extrapolated tail (finite case)
  std::string reason;
  std::vector<WindowRecord> windows;
};

// Classifies int_{y0}^inf exp(log_f(y)) dy over geometric windows
// [y0, 2 y0], [2 y0, 4 y0], ... with a fitted exponential/power tail model.
IntegralClassification classify_integral(const std::function<long double(long double)>& log_f,
                                         long double y0, const ClassifierOptions& opts = {});

enum class ConstantKind { Zero, Finite, Infinite, Inconclusive };

const char* to_string(ConstantKind k) noexcept;

struct BisectionResult {
  ConstantKind kind = ConstantKind::Inconclusive;
  double value = 0.0;             // c* when kind == Finite
  double lo = 0.0, hi = 0.0;      // final bracket
  int iterations = 0;
  bool resolution_limited = false;  // stopped early on an inconclusive midpoint
  std::string reason;
};

// c* = inf{c : finite(c)} by bisection on log c over [c_lo, c_hi]. Both end
// points must classify conclusively. Stops once hi / lo - 1 < resolution.
BisectionResult bisect_threshold(const std::function<Verdict(double)>& classify, double c_lo = 1e-3,
                                 double c_hi = 1e3, int iterations = 40, double resolution = 1e-7);

// Tail mass G(s) = int_{|x| >= s} phi0^2 dx, evaluated in log form.
class StationaryTail {
 public:
  // Grid tail inside the certified radius, fitted a + b log s - k s^q beyond.
  explicit StationaryTail(const SpectralSolution& sol);
  // phi0^2 = sqrt(gamma/pi) exp(-gamma x^2) in d = 1: G(s) = erfc(sqrt(gamma) s).
  static StationaryTail gaussian(double gamma);
  static StationaryTail custom(LogFn log_tail, std::string label);

  long double log_tail(long double log_s) const { return fn_(log_s); }
  const std::string& label() const { return label_; }
  // Fitted extension (grid-based tails only).
  double fit_q = 0.0, fit_b = 0.0, fit_k = 0.0, fit_residual = 0.0, r_cert = 0.0;
  int d = 1;

 private:
  StationaryTail() = default;
  LogFn fn_;
  std::string label_;
};

// I(c, tau) = int_1^inf dr int_{|x| >= tau(r)} phi0^2(c x) dx = c^{-d} int G(c tau(r)) dr.
IntegralClassification integral_test_general(const StationaryTail& tail, const ProfileFunction& tau,
                                             double c, const ClassifierOptions& opts = {});
BisectionResult escape_constant_general(const StationaryTail& tail, const ProfileFunction& tau,
                                        const ClassifierOptions& opts = {});

struct ProfileTestSpec {
  DensityProfile f;
  Potential V = Potential::polynomial(1);
  bool confining = true;
  KappaFunction kappa = KappaFunction::constant();
  int d = 1;
  // decaying, exponential lower estimate
  double theta = 1.0;
  double lambda0 = 0.0;
  double epsilon = 0.1;
};

struct ProfileTestResult {
  bool confining = true;
  // confining: first = I^low, second = I^up; decaying: first = I_{nu,kappa}, second = I^eps
  IntegralClassification first, second;
};

ProfileTestResult integral_test_profile(const ProfileTestSpec& spec, const ProfileFunction& tau, double c,
                                        const ClassifierOptions& opts = {});

struct ProfileConstants {
  BisectionResult first;   // c^low (confining) or c_{nu,kappa} (decaying)
  BisectionResult second;  // c^up (confining) or c^eps (decaying)
};

ProfileConstants profile_constants(const ProfileTestSpec& spec, const ProfileFunction& tau,
                                   const ClassifierOptions& opts = {});

// Parameter record for the closed-form catalogue.
struct EscapeCase {
  std::string regime = "confining";  // confining | decaying | ou | finite_well | regular_variation
  DensityProfile f;
  // V ~ exp(eta r^vartheta) r^rho log(1+r)^sigma (confining)
  double eta = 0.0, vartheta = 0.0, rho = 0.0, sigma = 0.0;
  double delta = 1.5;       // iterated-log exponent for polynomial cases
  double gamma = 1.0;       // OU
  double lambda0 = 0.0;     // finite well, decaying exponential case
  double theta = 1.0;       // decaying exponential case
  bool low_lying = true;    // decaying L3: lambda0 below the threshold
  double A = 1.0, lambda = 1.0;  // regular variation with L = 1
};

struct EscapeConstant {
  double value = 0.0;        // 0 and inf are legitimate answers
  bool lower_bound = false;  // only a lower bound is known
  std::string profile;       // human-readable profile
  ProfileFunction tau = ProfileFunction::log_power(1.0);
  std::string regime;
};

EscapeConstant escape_constant(const EscapeCase& c);

struct EmpiricalLimsup {
  long long n_start = 3;
  std::vector<long long> trace_n;
  std::vector<double> trace_ratio;   // max_{k <= n} |X_k| / tau(n)
  double c_hat = 0.0;
  double band_lo = 0.0, band_hi = 0.0;  // Gumbel-scale heuristic
  std::vector<double> c_grid;
  std::vector<long long> exceed_count;  // #{n >= n_start : |X_n| >= c tau(n)}
  std::vector<long long> last_exceed;   // 0 when never
};

// abs_values[i] = |X_{i+1}|; requires at least 1000 values.
EmpiricalLimsup empirical_limsup(std::span<const double> abs_values, const ProfileFunction& tau,
                                 const std::vector<double>& c_grid, long long n_start = 3,
                                 int trace_points = 200);

}  // namespace gstlab
