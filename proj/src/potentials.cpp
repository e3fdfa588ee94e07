#include "gstlab/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gstlab/errors.hpp"

namespace gstlab {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, msg);
}

double get(const std::map<std::string, double>& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw ConfigError("potential." + key, "missing parameter");
  return it->second;
}

double get_or(const std::map<std::string, double>& p, const std::string& key, double dflt) {
  auto it = p.find(key);
  return it == p.end() ? dflt : it->second;
}

double radical_inverse(unsigned i, unsigned base) {
  double inv = 1.0 / base, f = inv, out = 0.0;
  while (i > 0) {
    out += f * (i % base);
    i /= base;
    f *= inv;
  }
  return out;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

const char* to_string(PotentialFamily f) noexcept {
  switch (f) {
    case PotentialFamily::Polynomial: return "polynomial";
    case PotentialFamily::DoubleWell: return "double_well";
    case PotentialFamily::ExpPolyLog: return "exp_poly_log";
    case PotentialFamily::Well: return "well";
    case PotentialFamily::Coulomb: return "coulomb";
    case PotentialFamily::Yukawa: return "yukawa";
    case PotentialFamily::PoschlTeller: return "poschl_teller";
    case PotentialFamily::Morse: return "morse";
    case PotentialFamily::Custom: return "custom";
  }
  return "custom";
}

const char* to_string(PotentialKind k) noexcept {
  return k == PotentialKind::Confining ? "confining" : "decaying";
}

PotentialFamily potential_family_from_string(const std::string& s) {
  for (auto f : {PotentialFamily::Polynomial, PotentialFamily::DoubleWell,
                 PotentialFamily::ExpPolyLog, PotentialFamily::Well, PotentialFamily::Coulomb,
                 PotentialFamily::Yukawa, PotentialFamily::PoschlTeller, PotentialFamily::Morse,
                 PotentialFamily::Custom})
    if (s == to_string(f)) return f;
  throw ConfigError("potential.family", "unknown potential family '" + s + "'");
}

Potential Potential::polynomial(int n, double coeff, double shift) {
  require(n >= 1, "polynomial potential: n must be >= 1");
  require(coeff > 0.0, "polynomial potential: coeff must be positive");
  Potential v;
  v.family_ = PotentialFamily::Polynomial;
  v.kind_ = PotentialKind::Confining;
  v.n_ = n;
  v.p1_ = coeff;
  v.p2_ = shift;
  v.label_ = "polynomial";
  return v;
}

Potential Potential::ornstein_uhlenbeck(double gamma) {
  require(gamma > 0.0, "OU potential: gamma must be positive");
  return polynomial(1, 0.5 * gamma * gamma, -0.5 * gamma);
}

Potential Potential::double_well(double b) {
  require(b >= 0.0, "double well: b must be nonnegative");
  Potential v;
  v.family_ = PotentialFamily::DoubleWell;
  v.p1_ = b;
  v.label_ = "double_well";
  return v;
}

Potential Potential::exp_poly_log(double eta, double vartheta, double rho, double sigma) {
  require(eta >= 0.0 && vartheta >= 0.0 && rho >= 0.0 && sigma >= 0.0,
          "exp_poly_log: eta, vartheta, rho, sigma must be nonnegative");
  require((eta > 0.0 && vartheta > 0.0) || rho > 0.0 || sigma > 0.0,
          "exp_poly_log: g must grow to infinity");
  Potential v;
  v.family_ = PotentialFamily::ExpPolyLog;
  v.p1_ = eta;
  v.p2_ = vartheta;
  v.p3_ = rho;
  v.p4_ = sigma;
  v.label_ = "exp_poly_log";
  return v;
}

Potential Potential::well(double depth, double radius) {
  require(depth > 0.0 && radius > 0.0, "well: depth and radius must be positive");
  Potential v;
  v.family_ = PotentialFamily::Well;
  v.kind_ = PotentialKind::Decaying;
  v.p1_ = depth;
  v.p2_ = radius;
  v.label_ = "well";
  return v;
}

Potential Potential::coulomb(double charge, double soft) {
  require(charge > 0.0 && soft >= 0.0, "coulomb: charge > 0, soft >= 0");
  Potential v;
  v.family_ = PotentialFamily::Coulomb;
  v.kind_ = PotentialKind::Decaying;
  v.p1_ = charge;
  v.p2_ = soft;
  v.label_ = "coulomb";
  return v;
}

Potential Potential::yukawa(double charge, double screening, double soft) {
  require(charge > 0.0 && screening > 0.0 && soft >= 0.0,
          "yukawa: charge > 0, screening > 0, soft >= 0");
  Potential v;
  v.family_ = PotentialFamily::Yukawa;
  v.kind_ = PotentialKind::Decaying;
  v.p1_ = charge;
  v.p2_ = screening;
  v.p3_ = soft;
  v.label_ = "yukawa";
  return v;
}

Potential Potential::poschl_teller(double a, double b) {
  require(a > 0.0 && b > 0.0, "poschl_teller: a and b must be positive");
  Potential v;
  v.family_ = PotentialFamily::PoschlTeller;
  v.kind_ = PotentialKind::Decaying;
  v.p1_ = a;
  v.p2_ = b;
  v.label_ = "poschl_teller";
  return v;
}

Potential Potential::morse(double a, double b, double r0) {
  require(a > 0.0 && b > 0.0 && r0 >= 0.0, "morse: a > 0, b > 0, r0 >= 0");
  Potential v;
  v.family_ = PotentialFamily::Morse;
  v.kind_ = PotentialKind::Decaying;
  v.p1_ = a;
  v.p2_ = b;
  v.p3_ = r0;
  v.label_ = "morse";
  return v;
}

Potential Potential::custom(std::function<double(double)> fn, PotentialKind kind, std::string label) {
  require(static_cast<bool>(fn), "custom potential: function is empty");
  Potential v;
  v.family_ = PotentialFamily::Custom;
  v.kind_ = kind;
  v.custom_ = std::move(fn);
  v.label_ = std::move(label);
  return v;
}

Potential Potential::from_params(PotentialFamily family, const std::map<std::string, double>& p) {
  switch (family) {
    case PotentialFamily::Polynomial:
      return polynomial(static_cast<int>(get(p, "n")), get_or(p, "coeff", 1.0),
                        get_or(p, "shift", 0.0));
    case PotentialFamily::DoubleWell: return double_well(get(p, "b"));
    case PotentialFamily::ExpPolyLog:
      return exp_poly_log(get_or(p, "eta", 0.0), get_or(p, "vartheta", 0.0),
                          get_or(p, "rho", 0.0), get_or(p, "sigma", 0.0));
    case PotentialFamily::Well: return well(get(p, "depth"), get(p, "radius"));
    case PotentialFamily::Coulomb: return coulomb(get(p, "charge"), get_or(p, "soft", 1.0));
    case PotentialFamily::Yukawa:
      return yukawa(get(p, "charge"), get(p, "screening"), get_or(p, "soft", 1.0));
    case PotentialFamily::PoschlTeller: return poschl_teller(get(p, "a"), get(p, "b"));
    case PotentialFamily::Morse: return morse(get(p, "a"), get(p, "b"), get_or(p, "r0", 0.0));
    case PotentialFamily::Custom:
      throw ConfigError("potential.family", "custom potentials cannot be built from a config");
  }
  throw ConfigError("potential.family", "unknown family");
}

std::map<std::string, double> Potential::params() const {
  switch (family_) {
    case PotentialFamily::Polynomial: return {{"n", n_}, {"coeff", p1_}, {"shift", p2_}};
    case PotentialFamily::DoubleWell: return {{"b", p1_}};
    case PotentialFamily::ExpPolyLog:
      return {{"eta", p1_}, {"vartheta", p2_}, {"rho", p3_}, {"sigma", p4_}};
    case PotentialFamily::Well: return {{"depth", p1_}, {"radius", p2_}};
    case PotentialFamily::Coulomb: return {{"charge", p1_}, {"soft", p2_}};
    case PotentialFamily::Yukawa: return {{"charge", p1_}, {"screening", p2_}, {"soft", p3_}};
    case PotentialFamily::PoschlTeller: return {{"a", p1_}, {"b", p2_}};
    case PotentialFamily::Morse: return {{"a", p1_}, {"b", p2_}, {"r0", p3_}};
    case PotentialFamily::Custom: return {};
  }
  return {};
}

double Potential::radial(double r) const {
  switch (family_) {
    case PotentialFamily::Polynomial: return p1_ * std::pow(r, 2 * n_) + p2_;
    case PotentialFamily::DoubleWell: {
      double r2 = r * r;
      return r2 * r2 - p1_ * r2;
    }
    case PotentialFamily::ExpPolyLog:
      return std::exp(p1_ * std::pow(r, p2_)) * std::pow(r, p3_) * std::pow(std::log1p(r), p4_);
    case PotentialFamily::Well: return r <= p2_ ? -p1_ : 0.0;
    case PotentialFamily::Coulomb: return -p1_ / std::sqrt(r * r + p2_ * p2_);
    case PotentialFamily::Yukawa: return -p1_ * std::exp(-p2_ * r) / std::sqrt(r * r + p3_ * p3_);
    case PotentialFamily::PoschlTeller: {
      double c = std::cosh(p2_ * r);
      return std::isfinite(c) ? -p1_ / (c * c) : 0.0;
    }
    case PotentialFamily::Morse: {
      double e = 1.0 - std::exp(-p2_ * (r - p3_));
      return p1_ * (e * e - 1.0);
    }
    case PotentialFamily::Custom:
      throw Error(ErrorCode::InvalidArgument, "custom potential has no radial profile");
  }
  return 0.0;
}

double Potential::at(double x) const {
  if (family_ == PotentialFamily::Custom) return custom_(x);
  return radial(std::abs(x));
}

double Potential::operator()(std::span<const double> x) const {
  if (family_ == PotentialFamily::Custom) {
    require(x.size() == 1, "custom potential is defined for d = 1 only");
    return custom_(x[0]);
  }
  double s = 0.0;
  for (double v : x) s += v * v;
  return radial(std::sqrt(s));
}

double potential_eval(const Potential& V, std::span<const double> x) { return V(x); }

std::vector<double> Potential::kinks() const {
  if (family_ == PotentialFamily::Well) return {p2_};
  return {};
}

bool Potential::needs_cell_average() const {
  switch (family_) {
    case PotentialFamily::Well: return true;
    case PotentialFamily::Coulomb: return p2_ == 0.0;
    case PotentialFamily::Yukawa: return p3_ == 0.0;
    default: return false;
  }
}

std::pair<double, double> Potential::radial_extrema(double lo, double hi) const {
  lo = std::max(lo, 0.0);
  auto clamp = [&](double r) { return std::clamp(r, lo, hi); };
  switch (family_) {
    case PotentialFamily::DoubleWell: {
      double rstar = std::sqrt(p1_ / 2.0);
      return {radial(clamp(rstar)), std::max(radial(lo), radial(hi))};
    }
    case PotentialFamily::Morse:
      return {radial(clamp(p3_)), std::max(radial(lo), radial(hi))};
    case PotentialFamily::Well: {
      double inf = lo <= p2_ ? -p1_ : 0.0;
      double sup = hi > p2_ ? 0.0 : -p1_;
      return {inf, sup};
    }
    case PotentialFamily::Custom:
      throw Error(ErrorCode::InvalidArgument, "custom potential has no radial profile");
    default:
      // Remaining families are non-decreasing in r.
      return {radial(lo), radial(hi)};
  }
}

long double Potential::log1v_at(long double L) const {
  switch (family_) {
    case PotentialFamily::Polynomial: {
      long double lead = std::log(static_cast<long double>(p1_)) + 2.0L * n_ * L;
      if (lead < 40.0L) {
        long double v = std::exp(lead) + p2_;
        return v > 1.0L ? std::log(v) : 0.0L;
      }
      return std::max(0.0L, lead + std::log1p(p2_ * std::exp(-lead)));
    }
    case PotentialFamily::DoubleWell: {
      if (L < 20.0L) {
        long double r2 = std::exp(2.0L * L);
        long double v = r2 * r2 - p1_ * r2;
        return v > 1.0L ? std::log(v) : 0.0L;
      }
      return 4.0L * L + std::log1p(-p1_ * std::exp(-2.0L * L));
    }
    case PotentialFamily::ExpPolyLog: {
      long double lg = 0.0L;
      if (p1_ > 0.0) lg += p1_ * std::exp(static_cast<long double>(p2_) * L);
      if (p3_ > 0.0) lg += p3_ * L;
      if (p4_ > 0.0) {
        long double l1p = L > 40.0L ? L + std::log1p(std::exp(-L)) : std::log1p(std::exp(L));
        lg += p4_ * std::log(l1p);
      }
      return std::max(0.0L, lg);
    }
    default: {
      double v = radial(static_cast<double>(std::exp(L)));
      return v > 1.0 ? std::log(v) : 0.0;
    }
  }
}

namespace {

// Radius beyond which g is non-decreasing.
double monotone_from(PotentialFamily f, double p1, double p3) {
  if (f == PotentialFamily::DoubleWell) return std::sqrt(p1 / 2.0);
  if (f == PotentialFamily::Morse) return p3;
  return 0.0;
}

}  // namespace

long double Potential::log1v_up(long double L) const {
  require(is_radial(), "log1v_up: radial families only");
  double s = static_cast<double>(std::exp(std::min(L, 700.0L)));
  if (kind_ == PotentialKind::Decaying || L < 30.0L ||
      s < monotone_from(family_, p1_, p3_) + 1.0) {
    double sup = radial_extrema(s - 1.0, s + 1.0).second;
    if (std::isfinite(sup) || kind_ == PotentialKind::Decaying) return sup > 1.0 ? std::log(sup) : 0.0;
  }
  return log1v_at(L + std::log1p(std::exp(-L)));
}

long double Potential::log1v_low(long double L) const {
  require(is_radial(), "log1v_low: radial families only");
  double s = static_cast<double>(std::exp(std::min(L, 700.0L)));
  if (kind_ == PotentialKind::Decaying || L < 30.0L ||
      s < monotone_from(family_, p1_, p3_) + 1.0) {
    double inf = radial_extrema(s - 1.0, s + 1.0).first;
    if (std::isfinite(inf) || kind_ == PotentialKind::Decaying) return inf > 1.0 ? std::log(inf) : 0.0;
  }
  return log1v_at(L + std::log1p(-std::exp(-L)));
}

double Potential::radius_beyond_which_flat() const {
  if (kind_ == PotentialKind::Confining) return kInf;
  switch (family_) {
    case PotentialFamily::Well:
    case PotentialFamily::Coulomb:
    case PotentialFamily::Yukawa:
    case PotentialFamily::PoschlTeller: return 1.0;  // V <= 0 everywhere
    case PotentialFamily::Morse: return p3_ + 1.0;   // V <= 0 on r >= r0
    default: return std::numeric_limits<double>::quiet_NaN();
  }
}

UnitBallEnvelope sampled_envelope(const Potential& V, std::span<const double> x, int samples) {
  require(samples >= 8, "unit_ball_envelope: samples must be >= 8");
  const std::size_t d = x.size();
  require(d == 1 || d == 2, "unit_ball_envelope: d must be 1 or 2");
  double norm = 0.0;
  for (double v : x) norm += v * v;
  norm = std::sqrt(norm);
  std::vector<double> dir(d, 0.0);
  if (norm > 0.0)
    for (std::size_t i = 0; i < d; ++i) dir[i] = x[i] / norm;
  else
    dir[0] = 1.0;

  UnitBallEnvelope env{-kInf, kInf};
  std::vector<double> y(d);
  auto probe = [&](const std::vector<double>& pt) {
    double v = V(pt);
    env.v_up = std::max(env.v_up, v);
    env.v_low = std::min(env.v_low, v);
  };
  auto offset = [&](double t) {
    for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + t * dir[i];
    probe(y);
  };
  offset(0.0);
  offset(1.0);
  offset(-1.0);
  if (norm <= 1.0) offset(-norm);  // the origin lies in the ball
  for (int i = 1; i <= samples; ++i) {
    if (d == 1) {
      y[0] = x[0] + 2.0 * radical_inverse(i, 2) - 1.0;
    } else {
      double rad = std::sqrt(radical_inverse(i, 2));
      double ang = 2.0 * std::numbers::pi * radical_inverse(i, 3);
      y[0] = x[0] + rad * std::cos(ang);
      y[1] = x[1] + rad * std::sin(ang);
    }
    probe(y);
  }
  return env;
}

UnitBallEnvelope unit_ball_envelope(const Potential& V, std::span<const double> x, int samples) {
  require(samples >= 8, "unit_ball_envelope: samples must be >= 8");
  if (!V.is_radial()) return sampled_envelope(V, x, samples);
  double norm = 0.0;
  for (double v : x) norm += v * v;
  norm = std::sqrt(norm);
  auto [lo, hi] = V.radial_extrema(std::max(0.0, norm - 1.0), norm + 1.0);
  return {hi, lo};
}

AlmostConstantReport almost_constant_diagnostic(const Potential& V, int d, double r_max) {
  AlmostConstantReport rep;
  const int n = 200;
  for (int i = 0; i <= n; ++i) {
    double r = 10.0 * std::pow(r_max / 10.0, static_cast<double>(i) / n);
    double ratio;
    if (V.is_radial()) {
      long double L = std::log(static_cast<long double>(r));
      ratio = static_cast<double>(std::exp(V.log1v_up(L) - V.log1v_low(L)));
    } else {
      std::vector<double> x(d, 0.0);
      x[0] = r;
      auto env = unit_ball_envelope(V, x);
      ratio = std::max(1.0, env.v_up) / std::max(1.0, env.v_low);
    }
    rep.max_ratio = std::max(rep.max_ratio, ratio);
  }
  rep.holds = rep.max_ratio <= rep.threshold;
  return rep;
}

std::pair<long double, long double> log_g_profiles(const Potential& V, long double L, int d) {
  if (V.is_radial()) return {-V.log1v_up(L), -V.log1v_low(L)};
  require(d == 1, "g_profiles: custom potentials are d = 1 only");
  double r = static_cast<double>(std::exp(L));
  double wu = 0.0, wl = 0.0;
  for (double s : {r, -r}) {
    double xs[1] = {s};
    auto env = unit_ball_envelope(V, xs);
    wu += 0.5 / std::pow(std::max(1.0, env.v_up), 2);
    wl += 0.5 / std::pow(std::max(1.0, env.v_low), 2);
  }
  return {0.5L * std::log(static_cast<long double>(wu)), 0.5L * std::log(static_cast<long double>(wl))};
}

GProfiles g_profiles(const Potential& V, double r, int d) {
  require(r > 1.0, "g_profiles: r must exceed 1");
  auto [lu, ll] = log_g_profiles(V, std::log(static_cast<long double>(r)), d);
  return {static_cast<double>(std::exp(lu)), static_cast<double>(std::exp(ll))};
}

}  // namespace gstlab
