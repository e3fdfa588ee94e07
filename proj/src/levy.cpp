#include "gstlab/levy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "gstlab/errors.hpp"

namespace gstlab {

namespace {

constexpr double kPi = std::numbers::pi;

double sphere_area(int d) { return d == 1 ? 2.0 : 2.0 * kPi; }

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, msg);
}

}  // namespace

const char* to_string(ProfileClass c) noexcept {
  switch (c) {
    case ProfileClass::L1: return "L1";
    case ProfileClass::L2: return "L2";
    case ProfileClass::L3: return "L3";
    case ProfileClass::Unsupported: return "UNSUPPORTED";
  }
  return "UNSUPPORTED";
}

const char* to_string(SymbolForm s) noexcept {
  switch (s) {
    case SymbolForm::Stable: return "stable";
    case SymbolForm::Relativistic: return "relativistic";
    case SymbolForm::StableDiffusion: return "sum-of-stable-and-diffusion";
    case SymbolForm::GenericFromDensity: return "generic-from-density";
    case SymbolForm::Brownian: return "brownian";
  }
  return "brownian";
}

SymbolForm symbol_form_from_string(const std::string& s) {
  if (s == "stable") return SymbolForm::Stable;
  if (s == "relativistic") return SymbolForm::Relativistic;
  if (s == "sum-of-stable-and-diffusion") return SymbolForm::StableDiffusion;
  if (s == "generic-from-density") return SymbolForm::GenericFromDensity;
  if (s == "brownian") return SymbolForm::Brownian;
  throw Error(ErrorCode::InvalidArgument, "unknown symbol form '" + s + "'");
}

void DensityProfile::validate() const {
  require(d >= 1, "density profile: d must be a positive integer");
  require(alpha > 0.0 && alpha < 2.0, "density profile: alpha must lie in (0,2)");
  require(mu >= 0.0 && beta >= 0.0 && gamma >= 0.0,
          "density profile: mu, beta, gamma must be nonnegative");
}

double DensityProfile::log_value(double r) const {
  if (r <= 1.0) return -(d + alpha) * std::log(r);
  return -mu * std::pow(r, beta) - gamma * std::log(r);
}

long double DensityProfile::log_value_ld(long double lr) const {
  if (lr <= 0.0L) return -(d + alpha) * lr;
  long double out = -static_cast<long double>(gamma) * lr;
  if (mu > 0.0) out -= mu * std::exp(static_cast<long double>(beta) * lr);
  return out;
}

double DensityProfile::operator()(double r) const { return std::exp(log_value(r)); }

double DensityProfile::dlog(double r) const {
  if (r < 1.0) return -(d + alpha) / r;
  return -mu * beta * std::pow(r, beta - 1.0) - gamma / r;
}

double density_eval(const DensityProfile& p, double r) {
  if (!(r > 0.0)) {
    std::ostringstream os;
    os << "density_eval: r must be positive, got " << r;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  return p(r);
}

ProfileClass classify_profile(const DensityProfile& p) {
  if (p.mu == 0.0 && p.gamma > p.d) return ProfileClass::L1;
  if (p.mu > 0.0 && p.beta > 0.0 && p.beta < 1.0) return ProfileClass::L2;
  if (p.mu > 0.0 && p.beta == 1.0 && p.gamma > (p.d + 1) / 2.0) return ProfileClass::L3;
  return ProfileClass::Unsupported;
}

double stable_constant(int d, double alpha) {
  using boost::math::tgamma;
  return alpha * std::pow(2.0, alpha - 1.0) * tgamma((d + alpha) / 2.0) /
         (std::pow(kPi, d / 2.0) * tgamma(1.0 - alpha / 2.0));
}

LevyModel LevyModel::stable(int d, double alpha) {
  LevyModel m;
  m.form_ = SymbolForm::Stable;
  m.profile_ = {d, alpha, 0.0, 0.0, d + alpha};
  m.profile_.validate();
  require(d == 1 || d == 2, "levy model: only d = 1, 2 are supported");
  m.stable_norm_ = stable_constant(d, alpha);
  return m;
}

LevyModel LevyModel::stable_with_diffusion(int d, double alpha, double sigma2) {
  require(sigma2 >= 0.0, "levy model: sigma2 must be nonnegative");
  LevyModel m = stable(d, alpha);
  m.form_ = SymbolForm::StableDiffusion;
  m.sigma2_ = sigma2;
  return m;
}

LevyModel LevyModel::relativistic(int d, double alpha, double mass) {
  require(mass > 0.0, "levy model: relativistic mass must be positive");
  LevyModel m = stable(d, alpha);
  m.form_ = SymbolForm::Relativistic;
  m.mass_ = mass;
  m.profile_.mu = std::pow(mass, 1.0 / alpha);
  m.profile_.beta = 1.0;
  m.profile_.gamma = (d + 1 + alpha) / 2.0;
  return m;
}

LevyModel LevyModel::brownian(int d, double sigma2) {
  require(d == 1 || d == 2, "levy model: only d = 1, 2 are supported");
  require(sigma2 > 0.0, "levy model: brownian model needs sigma2 > 0");
  LevyModel m;
  m.form_ = SymbolForm::Brownian;
  m.sigma2_ = sigma2;
  m.profile_.d = d;
  return m;
}

LevyModel LevyModel::from_density(const DensityProfile& p, double sigma2, double jump_scale) {
  p.validate();
  require(p.d == 1 || p.d == 2, "levy model: only d = 1, 2 are supported");
  require(sigma2 >= 0.0, "levy model: sigma2 must be nonnegative");
  require(jump_scale > 0.0, "levy model: jump scale must be positive");
  require(p.mu > 0.0 || p.gamma > p.d,
          "levy model: f must be integrable at infinity (mu > 0 or gamma > d)");
  LevyModel m;
  m.form_ = SymbolForm::GenericFromDensity;
  m.sigma2_ = sigma2;
  m.scale_ = jump_scale;
  m.profile_ = p;
  m.stable_norm_ = stable_constant(p.d, p.alpha);
  return m;
}

namespace {

// psi_generic(xi) = |xi|^alpha / c_{d,alpha} + correction from the r > 1 piece
// q(r) = h(r) - r^{-d-alpha}, h the large-jump profile.
double generic_correction(const DensityProfile& p, double xi) {
  const double a = p.alpha;
  const int d = p.d;
  auto h = [&](double r) { return std::exp(-p.mu * std::pow(r, p.beta) - p.gamma * std::log(r)); };
  const quad::Tolerance tol{1e-10, 1e-9};

  // Radial mass of q weighted by r^{d-1} on (1, inf).
  double mass_h;
  if (p.mu == 0.0) {
    mass_h = 1.0 / (p.gamma - d);
  } else {
    mass_h = quad::integrate([&](double r) { return std::pow(r, d - 1) * h(r); }, 1.0,
                             std::numeric_limits<double>::infinity(), tol)
                 .value;
  }
  const double mass_q = mass_h - 1.0 / a;

  if (d == 1) {
    // 2 int_1^inf (1 - cos(xi r)) q(r) dr
    auto q = [&](double r) { return h(r) - std::pow(r, -1.0 - a); };
    double osc = quad::cos_tail(q, 1.0, xi).value;
    return 2.0 * (mass_q - osc);
  }

  // d == 2: 2 pi int_1^inf r q(r) (1 - J0(xi r)) dr
  auto rq = [&](double r) { return r * (h(r) - std::pow(r, -2.0 - a)); };
  const double x_switch = 40.0;
  double r_s = std::max(1.0, x_switch / xi);
  double near = 0.0;
  if (r_s > 1.0) {
    std::vector<double> br;
    for (double z = std::ceil(xi / kPi) * kPi / xi; z < r_s; z += kPi / xi) br.push_back(z);
    near = quad::integrate(
               [&](double r) { return rq(r) * boost::math::cyl_bessel_j(0, xi * r); }, 1.0, r_s,
               tol, br)
               .value;
  }
  // Hankel expansion of J0 beyond x = xi r_s.
  auto amp = [&](double r, int which) {
    double x = xi * r;
    double x2 = x * x;
    double P = 1.0 - 9.0 / (128.0 * x2) + 3675.0 / (32768.0 * x2 * x2);
    double Q = -1.0 / (8.0 * x) + 75.0 / (1024.0 * x2 * x);
    double A = std::sqrt(2.0 / (kPi * x)) / std::numbers::sqrt2;
    return rq(r) * A * (which == 0 ? P + Q : P - Q);
  };
  double far = quad::cos_tail([&](double r) { return amp(r, 0); }, r_s, xi).value +
               quad::sin_tail([&](double r) { return amp(r, 1); }, r_s, xi).value;
  return 2.0 * kPi * (mass_q - near - far);
}

}  // namespace

double LevyModel::symbol(double xi) const {
  xi = std::abs(xi);
  if (xi == 0.0) return 0.0;
  const double diff = 0.5 * sigma2_ * xi * xi;
  const double a = profile_.alpha;
  switch (form_) {
    case SymbolForm::Brownian: return diff;
    case SymbolForm::Stable:
    case SymbolForm::StableDiffusion: return diff + std::pow(xi, a);
    case SymbolForm::Relativistic: {
      double m2 = std::pow(mass_, 2.0 / a);
      return diff + mass_ * std::expm1(0.5 * a * std::log1p(xi * xi / m2));
    }
    case SymbolForm::GenericFromDensity: {
      double v = std::pow(xi, a) / stable_norm_ + generic_correction(profile_, xi);
      return diff + scale_ * std::max(v, 0.0);
    }
  }
  return diff;
}

double LevyModel::levy_density(double r) const {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "levy_density: r must be positive");
  const int d = profile_.d;
  const double a = profile_.alpha;
  switch (form_) {
    case SymbolForm::Brownian: return 0.0;
    case SymbolForm::Stable:
    case SymbolForm::StableDiffusion: return stable_norm_ * std::pow(r, -d - a);
    case SymbolForm::Relativistic: {
      double mu = profile_.mu;
      double nu_order = (d + a) / 2.0;
      double pref = a * std::pow(2.0, (a - d) / 2.0) * std::pow(mass_, (d + a) / (2.0 * a)) /
                    (std::pow(kPi, d / 2.0) * boost::math::tgamma(1.0 - a / 2.0));
      double x = mu * r;
      if (x > 700.0) return 0.0;
      return pref * boost::math::cyl_bessel_k(nu_order, x) * std::pow(r, -nu_order);
    }
    case SymbolForm::GenericFromDensity: return scale_ * profile_(r);
  }
  return 0.0;
}

double LevyModel::small_jump_variance(double eps) const {
  if (form_ == SymbolForm::Brownian || eps <= 0.0) return 0.0;
  const int d = profile_.d;
  const double a = profile_.alpha;
  // r^{2-a} = eps^{2-a} u maps the r^{1-a} singularity to a bounded integrand.
  auto g = [&](double u) {
    double r = eps * std::pow(u, 1.0 / (2.0 - a));
    if (r <= 0.0) r = 1e-300;
    return levy_density(r) * std::pow(r, d + a);
  };
  std::vector<double> br;
  if (eps > 1.0) br.push_back(std::pow(1.0 / eps, 2.0 - a));
  double inner = quad::integrate(g, 0.0, 1.0, {1e-14, 1e-10}, br).value;
  return sphere_area(d) / d * inner * std::pow(eps, 2.0 - a) / (2.0 - a);
}

double LevyModel::jump_intensity(double eps) const {
  if (form_ == SymbolForm::Brownian) return 0.0;
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "jump_intensity: eps must be positive");
  const int d = profile_.d;
  const double a = profile_.alpha;
  const double w = sphere_area(d);
  if (form_ == SymbolForm::Stable || form_ == SymbolForm::StableDiffusion)
    return w * stable_norm_ * std::pow(eps, -a) / a;
  auto integrand = [&](double r) { return std::pow(r, d - 1) * levy_density(r); };
  double lo = 0.0;
  double start = eps;
  if (eps < 1.0) {
    // r = eps u^{-1/a}: r^{-1-a} dr becomes eps^{-a}/a du on (0,1].
    auto g = [&](double u) {
      double r = eps * std::pow(u, -1.0 / a);
      return levy_density(r) * std::pow(r, d + a);
    };
    double u1 = std::pow(eps, a);
    lo = quad::integrate(g, u1, 1.0, {1e-14, 1e-10}).value * std::pow(eps, -a) / a;
    start = 1.0;
  }
  double hi;
  if (form_ == SymbolForm::GenericFromDensity && profile_.mu == 0.0) {
    hi = scale_ * std::pow(start, d - profile_.gamma) / (profile_.gamma - d);
  } else {
    hi = quad::integrate(integrand, start, std::numeric_limits<double>::infinity(), {1e-14, 1e-10})
             .value;
  }
  return w * (lo + hi);
}

double symbol_eval(const LevyModel& model, std::span<const double> xi) {
  double s = 0.0;
  for (double x : xi) {
    if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "symbol_eval: xi must be finite");
    s += x * x;
  }
  return model.symbol(std::sqrt(s));
}

namespace {

double paring_1d(const DensityProfile& p, double r, quad::Tolerance tol) {
  auto f = [&](double y) { return p(std::abs(r - y)) * p(std::abs(y)); };
  const double inf = std::numeric_limits<double>::infinity();
  double total = 0.0;
  total += quad::integrate(f, -inf, -1.0, tol).value;
  total += quad::integrate(f, -1.0, -0.5, tol).value;
  if (r - 0.5 > 0.5) {
    std::vector<double> br{1.0, r - 1.0};
    total += quad::integrate(f, 0.5, r - 0.5, tol, br).value;
  }
  total += quad::integrate(f, r + 0.5, r + 1.0, tol).value;
  total += quad::integrate(f, r + 1.0, inf, tol).value;
  return total;
}

double paring_2d(const DensityProfile& p, double r, quad::Tolerance tol) {
  const double inf = std::numeric_limits<double>::infinity();
  auto inner = [&](double rho) {
    double lo = 0.0;
    double c_ex = (r * r + rho * rho - 0.25) / (2.0 * r * rho);
    if (c_ex < 1.0) lo = c_ex <= -1.0 ? kPi : std::acos(c_ex);
    if (lo >= kPi) return 0.0;
    std::vector<double> br;
    double c1 = (r * r + rho * rho - 1.0) / (2.0 * r * rho);
    if (c1 > -1.0 && c1 < 1.0) br.push_back(std::acos(c1));
    auto g = [&](double phi) {
      double D2 = r * r + rho * rho - 2.0 * r * rho * std::cos(phi);
      return p(std::sqrt(std::max(D2, 1e-300)));
    };
    return quad::integrate(g, lo, kPi, {tol.abs * 1e-3, tol.rel * 1e-3}, br).value;
  };
  auto outer = [&](double rho) { return 2.0 * rho * p(rho) * inner(rho); };
  std::vector<double> br{1.0, r - 1.0, r - 0.5, r + 0.5, r + 1.0};
  double mid_hi = r + 2.0;
  return quad::integrate(outer, 0.5, mid_hi, tol, br).value +
         quad::integrate(outer, mid_hi, inf, tol).value;
}

}  // namespace

double jump_paring_ratio(const DensityProfile& p, double r, quad::Tolerance tol) {
  p.validate();
  if (!(r >= 1.0)) throw Error(ErrorCode::InvalidArgument, "check_jump_paring: radii must be >= 1");
  double conv = p.d == 1 ? paring_1d(p, r, tol)
                         : (p.d == 2 ? paring_2d(p, r, tol)
                                     : throw Error(ErrorCode::InvalidArgument,
                                                   "check_jump_paring: only d = 1, 2"));
  return conv / p(r);
}

JumpParingReport check_jump_paring(const DensityProfile& p, std::span<const double> r_grid,
                                   double cap) {
  JumpParingReport rep;
  rep.cap = cap;
  rep.bounded = true;
  for (double r : r_grid) {
    double ratio = jump_paring_ratio(p, r);
    rep.radii.push_back(r);
    rep.ratios.push_back(ratio);
    bool ok = std::isfinite(ratio) && ratio <= cap;
    rep.passes.push_back(ok);
    rep.bounded = rep.bounded && ok;
    rep.worst_ratio = std::max(rep.worst_ratio, ratio);
  }
  return rep;
}

}  // namespace gstlab
