#include "gstlab/envelopes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "gstlab/errors.hpp"
#include "gstlab/gst.hpp"
#include "gstlab/quadrature.hpp"

namespace gstlab {

namespace {

using json = nlohmann::ordered_json;
constexpr long double kNegInf = -std::numeric_limits<long double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// exp_k(1): the k-fold iterated exponential of 1 (k = 0 gives 1).
long double iterated_exp(int k) {
  long double v = 1.0L;
  for (int i = 0; i < k; ++i) v = std::exp(v);
  return v;
}

// Geometric grid of log radii between 10^1 and 10^max_decade.
std::vector<long double> decade_grid(double max_decade, int points = 48) {
  std::vector<long double> out;
  const long double ln10 = std::log(10.0L);
  for (int i = 0; i < points; ++i) {
    long double k = std::pow(static_cast<long double>(max_decade), static_cast<long double>(i) / (points - 1));
    out.push_back(k * ln10);
  }
  return out;
}

// Trend check for deviations that should vanish at infinity.
bool vanishing(const std::vector<double>& dev, double tol) {
  if (dev.empty()) return false;
  const std::size_t n = dev.size();
  for (std::size_t i = n > 5 ? n - 5 : 0; i < n; ++i)
    if (!(dev[i] < tol)) return false;
  return dev.back() <= dev.front() + 1e-12;
}

}  // namespace

const char* to_string(ProfileFamily f) noexcept {
  switch (f) {
    case ProfileFamily::IteratedLogPower: return "iterated_log_power";
    case ProfileFamily::LogPower: return "log_power";
    case ProfileFamily::CustomMonotone: return "custom-monotone";
  }
  return "?";
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Finite: return "finite";
    case Verdict::Divergent: return "divergent";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

const char* to_string(ConstantKind k) noexcept {
  switch (k) {
    case ConstantKind::Zero: return "zero";
    case ConstantKind::Finite: return "finite";
    case ConstantKind::Infinite: return "infinite";
    case ConstantKind::Inconclusive: return "inconclusive";
  }
  return "?";
}

// ---------------------------------------------------------------- profiles

ProfileFunction ProfileFunction::iterated_log_power(double gamma_prime, int d, std::vector<double> theta,
                                                    double delta) {
  require(d >= 1, "iterated_log_power: d must be >= 1");
  require(2.0 * gamma_prime - d > 0.0, "iterated_log_power: needs 2 gamma' > d");
  require(!theta.empty(), "iterated_log_power: needs theta_1..theta_k (k >= 1)");
  require(delta > 0.0, "iterated_log_power: delta must be positive");
  ProfileFunction p;
  p.family_ = ProfileFamily::IteratedLogPower;
  const int k = static_cast<int>(theta.size());
  std::vector<long double> expo(k);
  for (int i = 0; i < k; ++i) expo[i] = 2.0L * theta[i] + (i + 1 < k ? 1.0L : static_cast<long double>(delta));
  const long double inv = 1.0L / (2.0L * gamma_prime - d);
  p.log_tau_ = [expo, inv](long double L) {
    long double sum = L, cur = L;
    for (long double e : expo) {
      if (!(cur > 0.0L)) return kNegInf;
      const long double lg = std::log(cur);
      sum += e * lg;
      cur = lg;
    }
    return sum * inv;
  };
  // log_k r >= e, i.e. r >= exp_k(e).
  p.log_r_min_ = iterated_exp(k);
  std::ostringstream os;
  os << "(r";
  for (int i = 0; i < k; ++i) os << " (log_" << i + 1 << " r)^" << fmt(static_cast<double>(expo[i]));
  os << ")^(1/" << fmt(2.0 * gamma_prime - d) << ")";
  p.label_ = os.str();
  p.params_ = {{"gamma_prime", gamma_prime}, {"d", d}, {"theta", theta}, {"delta", delta}};
  return p;
}

ProfileFunction ProfileFunction::log_power(double lambda, LogFn log_lstar, double scale,
                                           std::string lstar_label) {
  require(lambda > 0.0, "log_power: lambda must be positive");
  require(scale > 0.0, "log_power: scale must be positive");
  ProfileFunction p;
  p.family_ = ProfileFamily::LogPower;
  const long double ls = std::log(static_cast<long double>(scale));
  const long double inv = 1.0L / lambda;
  p.log_tau_ = [ls, inv, log_lstar](long double L) {
    if (!(L > 0.0L)) return kNegInf;
    const long double lt = std::log(L);
    return ls + inv * lt + log_lstar(lt);
  };
  p.log_r_min_ = 1.0L;
  std::ostringstream os;
  if (scale != 1.0) os << fmt(scale) << " ";
  os << "(log r)^(1/" << fmt(lambda) << ")";
  if (lstar_label != "1") os << " L*(log r), L* = " << lstar_label;
  p.label_ = os.str();
  p.params_ = {{"lambda", lambda}, {"scale", scale}, {"L_star", lstar_label}};
  return p;
}

ProfileFunction ProfileFunction::log_power(double lambda, double scale) {
  return log_power(lambda, [](long double) { return 0.0L; }, scale, "1");
}

ProfileFunction ProfileFunction::custom(LogFn log_tau, long double log_r_min, std::string label) {
  ProfileFunction p;
  p.family_ = ProfileFamily::CustomMonotone;
  p.log_tau_ = std::move(log_tau);
  p.log_r_min_ = log_r_min;
  p.label_ = std::move(label);
  p.params_ = json::object();
  return p;
}

long double ProfileFunction::log_value(long double log_r) const { return log_tau_(log_r); }

double ProfileFunction::operator()(double r) const {
  return static_cast<double>(std::exp(log_tau_(std::log(static_cast<long double>(r)))));
}

json ProfileFunction::describe() const {
  json j;
  j["family"] = to_string(family_);
  j["label"] = label_;
  j["params"] = params_;
  j["log_r_min"] = static_cast<double>(log_r_min_);
  return j;
}

ProfileFunction profile_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  if (!j.contains("family") || !j["family"].is_string())
    throw ConfigError(path + ".family", "missing; one of iterated_log_power, log_power");
  const std::string fam = j["family"];
  auto number = [&](const char* key, double dflt, bool required) {
    if (!j.contains(key)) {
      if (required) throw ConfigError(path + "." + key, "missing required value");
      return dflt;
    }
    if (!j[key].is_number()) throw ConfigError(path + "." + key, "expected a number");
    return j[key].get<double>();
  };
  auto only = [&](std::initializer_list<const char*> keys) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool ok = false;
      for (const char* k : keys) ok = ok || it.key() == k;
      if (!ok) throw ConfigError(path + "." + it.key(), "unknown key");
    }
  };
  if (fam == "iterated_log_power") {
    only({"family", "gamma_prime", "d", "theta", "delta"});
    if (!j.contains("theta") || !j.contains("delta"))
      throw ConfigError(path + (j.contains("theta") ? ".delta" : ".theta"),
                        "iterated_log_power needs the iterated-log exponents theta_1..theta_k and delta");
    if (!j["theta"].is_array() || j["theta"].empty())
      throw ConfigError(path + ".theta", "expected a non-empty array theta_1..theta_k");
    std::vector<double> theta;
    for (std::size_t i = 0; i < j["theta"].size(); ++i) {
      if (!j["theta"][i].is_number())
        throw ConfigError(path + ".theta[" + std::to_string(i) + "]", "expected a number");
      theta.push_back(j["theta"][i].get<double>());
    }
    const double gp = number("gamma_prime", 0.0, true);
    const double delta = number("delta", 0.0, true);
    const int d = static_cast<int>(number("d", 1.0, false));
    if (!(2.0 * gp - d > 0.0)) throw ConfigError(path + ".gamma_prime", "needs 2 gamma_prime > d");
    if (!(delta > 0.0)) throw ConfigError(path + ".delta", "must be positive");
    return ProfileFunction::iterated_log_power(gp, d, theta, delta);
  }
  if (fam == "log_power") {
    only({"family", "lambda", "scale", "L_constant", "L_log_exponent"});
    const double lambda = number("lambda", 0.0, true);
    const double scale = number("scale", 1.0, false);
    if (!(lambda > 0.0)) throw ConfigError(path + ".lambda", "must be positive");
    if (!(scale > 0.0)) throw ConfigError(path + ".scale", "must be positive");
    const double lc = number("L_constant", 1.0, false);
    const double le = number("L_log_exponent", 0.0, false);
    if (!(lc > 0.0)) throw ConfigError(path + ".L_constant", "must be positive");
    if (lc == 1.0 && le == 0.0) return ProfileFunction::log_power(lambda, scale);
    // L(r) = L_constant (log r)^L_log_exponent
    const long double llc = std::log(static_cast<long double>(lc));
    LogFn logL = [llc, le](long double u) { return u > 0.0L ? llc + le * std::log(u) : llc; };
    ConjugateResult conj = conjugate_slowly_varying(logL, lambda);
    return ProfileFunction::log_power(lambda, conj.log_Lstar, scale,
                                      "conjugate of " + fmt(lc) + " (log r)^" + fmt(le));
  }
  if (fam == "custom-monotone")
    throw ConfigError(path + ".family", "custom-monotone profiles are only available through the library");
  throw ConfigError(path + ".family", "unknown profile family '" + fam + "'");
}

// --------------------------------------------------------- regular variation

double RegVarFunction::operator()(double r) const {
  return static_cast<double>(std::exp(log_value(std::log(static_cast<long double>(r)))));
}

IndexCheck check_index(const RegVarFunction& R, double max_decade) {
  IndexCheck out;
  const long double l2 = std::log(2.0L), l10 = std::log(10.0L);
  for (long double u : decade_grid(max_decade)) {
    out.log_radii.push_back(static_cast<double>(u));
    const long double base = R.log_value(u);
    out.dev2.push_back(static_cast<double>(std::abs(R.log_value(u + l2) - base - R.lambda * l2)));
    out.dev10.push_back(static_cast<double>(std::abs(R.log_value(u + l10) - base - R.lambda * l10)));
  }
  out.holds = vanishing(out.dev2, 1e-2) && vanishing(out.dev10, 1e-2);
  return out;
}

long double asymptotic_inverse_log(const RegVarFunction& R, long double log_t, long double log_r0) {
  require(R.lambda > 0.0, "asymptotic inverse: lambda must be positive");
  long double lo = log_r0;
  if (R.log_value(lo) >= log_t) return lo;
  long double hi = std::max(lo + 1.0L, log_t / R.lambda);
  for (int i = 0; R.log_value(hi) < log_t; ++i) {
    if (i > 200) throw Error(ErrorCode::InvalidArgument, "asymptotic inverse: R does not reach t");
    lo = hi;
    hi = 2.0L * hi + 1.0L;
  }
  for (int i = 0; i < 400 && hi - lo > 1e-17L * std::max(1.0L, std::abs(hi)); ++i) {
    const long double mid = 0.5L * (lo + hi);
    (R.log_value(mid) >= log_t ? hi : lo) = mid;
  }
  return hi;
}

ConjugateResult conjugate_slowly_varying(const LogFn& log_L, double lambda) {
  require(lambda > 0.0, "conjugate_slowly_varying: lambda must be positive");
  ConjugateResult out;
  for (long double u : decade_grid(300.0)) {
    const long double lu = log_L(u);
    out.log_radii.push_back(static_cast<double>(u));
    out.condition_dev.push_back(static_cast<double>(std::abs(lu - log_L(u - lu / lambda))));
  }
  out.closed_form = vanishing(out.condition_dev, 1e-2);
  if (out.closed_form) {
    out.log_Lstar = [log_L, lambda](long double lt) { return -log_L(lt / lambda) / lambda; };
  } else {
    out.warning = "technical condition L(r) ~ L(r / L(r)^{1/lambda}) not verified on the grid; "
                  "using the numeric asymptotic inverse";
    RegVarFunction R{lambda, log_L};
    out.log_Lstar = [R, lambda](long double lt) { return asymptotic_inverse_log(R, lt) - lt / lambda; };
  }
  return out;
}

// ------------------------------------------------------------------- kappa

KappaFunction KappaFunction::constant(double c) {
  require(c > 0.0, "kappa: constant must be positive");
  const long double lc = std::log(static_cast<long double>(c));
  return {[c](double) { return c; }, [](double) { return 0.0; }, [lc](long double) { return lc; },
          "const " + fmt(c)};
}

KappaFunction KappaFunction::power(double p) {
  require(p >= 0.0, "kappa: exponent must be non-negative");
  if (p == 0.0) return constant(1.0);
  return {[p](double r) { return std::pow(r, p); }, [p](double r) { return p * std::pow(r, p - 1.0); },
          [p](long double L) { return p * L; }, "r^" + fmt(p)};
}

KappaFunction KappaFunction::standard(const DensityProfile& f, double eta, double vartheta) {
  const double b = (f.mu > 0.0 && f.beta > 0.0) ? f.beta : 0.0;
  const double v = (eta > 0.0 && vartheta > 0.0) ? vartheta : 0.0;
  return power(std::max(b, v));
}

// --------------------------------------------------------- tail bound check

TailBoundReport tail_bound_check(const std::function<double(double)>& log_h, const KappaFunction& kappa,
                                 int d, double r_lo, double r_hi, const TailBoundOptions& opts) {
  require(r_lo > 0.0 && r_hi > r_lo, "tail_bound_check: needs 0 < r_lo < r_hi");
  require(opts.points >= 4, "tail_bound_check: needs at least 4 points");
  TailBoundReport rep;
  const double eps = opts.fd_step;
  auto dlog_h = [&](double r) { return (log_h(r * (1 + eps)) - log_h(r * (1 - eps))) / (2 * r * eps); };
  auto a_of = [&](double r) {  // -r d/dr (1/kappa)
    return -r * (1.0 / kappa.value(r * (1 + eps)) - 1.0 / kappa.value(r * (1 - eps))) / (2 * r * eps);
  };
  auto q_of = [&](double r) { return -r * dlog_h(r) - d; };

  std::vector<double> grid, check;
  for (int i = 0; i < opts.points; ++i)
    grid.push_back(r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (opts.points - 1)));
  check = grid;
  for (int i = 1; i <= opts.points / 2; ++i)
    check.push_back(r_hi * std::pow(opts.extend, static_cast<double>(i) / (opts.points / 2)));

  // (i) h(r) r^d -> 0
  {
    std::vector<double> v;
    for (int k = 0; k <= 6; ++k) {
      const double r = r_hi * std::pow(10.0, k);
      v.push_back(log_h(r) + d * std::log(r));
    }
    rep.pre_decay = v[6] < v[5] && v[5] < v[4] && v[6] < log_h(r_lo) + d * std::log(r_lo) - std::log(1e3);
    if (!rep.pre_decay) rep.failures.push_back("(i) h(r) r^d does not tend to 0");
  }
  // (iii) C^1: one-sided differences agree
  {
    rep.pre_smooth = true;
    for (double r : check) {
      const double h0 = log_h(r);
      const double fwd = (log_h(r * (1 + eps)) - h0) / (r * eps);
      const double bwd = (h0 - log_h(r * (1 - eps))) / (r * eps);
      if (std::abs(fwd - bwd) > 1e-3 * std::max(1.0, std::abs(fwd))) rep.pre_smooth = false;
    }
    if (!rep.pre_smooth) rep.failures.push_back("(iii) h is not C^1 on the range");
  }
  // Scaled tail int_{s>r} h(s) s^{d-1} ds / (h(r) r^{d-1}) by quadrature.
  auto scaled_tail = [&](double r) {
    const double lh = log_h(r);
    auto g = [&](double s) { return std::exp(log_h(s) - lh) * std::pow(s / r, d - 1); };
    return quad::integrate(g, r, kInf, {0.0, 1e-11}).value;
  };
  // (ii) integrability at infinity
  {
    rep.pre_integrable = false;
    try {
      const double t = scaled_tail(r_hi);
      rep.pre_integrable = std::isfinite(t) && t > 0.0 && q_of(check.back()) > 0.0;
    } catch (const Error&) {
    }
    if (!rep.pre_integrable) rep.failures.push_back("(ii) h r^{d-1} is not integrable at infinity");
  }

  double amax = -kInf, amin = kInf, bmax = -kInf, bmin = kInf;
  for (double r : check) {
    const double a = a_of(r), b = q_of(r) / kappa.value(r);
    amax = std::max(amax, a);
    amin = std::min(amin, a);
    bmax = std::max(bmax, b);
    bmin = std::min(bmin, b);
  }
  const bool pre = rep.pre_decay && rep.pre_integrable && rep.pre_smooth;
  rep.A1 = std::max(0.0, amax);
  rep.B1 = bmax;
  rep.L_holds = pre && bmax > 0.0;
  rep.A2 = amin;
  rep.B2 = bmin;
  rep.U_holds = pre && amin >= -1e-9 && bmin > 0.0;
  if (rep.U_holds) rep.A2 = std::max(0.0, amin);

  rep.conclusion_low_ok = rep.L_holds;
  rep.conclusion_up_ok = rep.U_holds;
  for (double r : grid) {
    TailBoundRow row;
    row.r = r;
    const double h = std::exp(log_h(r));
    const double base = h * std::pow(r, d) / kappa.value(r);
    row.tail = pre ? scaled_tail(r) * h * std::pow(r, d - 1) : std::numeric_limits<double>::quiet_NaN();
    row.bound_low = rep.L_holds ? base / (rep.A1 + rep.B1) : std::numeric_limits<double>::quiet_NaN();
    row.bound_up = rep.U_holds ? base / (rep.A2 + rep.B2) : std::numeric_limits<double>::quiet_NaN();
    if (rep.L_holds) {
      rep.worst_low = std::max(rep.worst_low, row.bound_low / row.tail);
      if (row.tail < row.bound_low * (1 - opts.rel_tol)) rep.conclusion_low_ok = false;
    }
    if (rep.U_holds) {
      rep.worst_up = std::max(rep.worst_up, row.tail / row.bound_up);
      if (row.tail > row.bound_up * (1 + opts.rel_tol)) rep.conclusion_up_ok = false;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

// -------------------------------------------------------------- classifier

namespace {

struct Fit {
  long double beta = 0, p = 0, rms = 0;  // log F(y) ~ a - beta (y / Y) - p log(y / Y)
  bool ok = false;
};

Fit fit_tail(const std::vector<std::pair<long double, long double>>& pts, long double Y) {
  Fit f;
  std::vector<std::pair<long double, long double>> use;
  for (const auto& pt : pts)
    if (std::isfinite(static_cast<double>(pt.second))) use.push_back(pt);
  if (use.size() < 4) return f;
  const long double ref = use.back().second;
  Eigen::Matrix<long double, Eigen::Dynamic, 3> A(use.size(), 3);
  Eigen::Matrix<long double, Eigen::Dynamic, 1> rhs(use.size());
  for (std::size_t i = 0; i < use.size(); ++i) {
    const long double t = use[i].first / Y;
    A(i, 0) = 1.0L;
    A(i, 1) = -t;
    A(i, 2) = -std::log(t);
    rhs(i) = use[i].second - ref;
  }
  const Eigen::Matrix<long double, 3, 1> x = A.colPivHouseholderQr().solve(rhs);
  f.beta = x(1);
  f.p = x(2);
  f.rms = std::sqrt((A * x - rhs).squaredNorm() / static_cast<long double>(use.size()));
  f.ok = std::isfinite(static_cast<double>(f.beta)) && std::isfinite(static_cast<double>(f.p));
  return f;
}

}  // namespace

IntegralClassification classify_integral(const std::function<long double(long double)>& log_f,
                                         long double y0, const ClassifierOptions& opts) {
  require(y0 > 0.0L, "classify_integral: y0 must be positive");
  IntegralClassification out;
  out.log_accumulated = kNegInf;
  out.log_tail_bound = kNegInf;
  std::vector<std::vector<std::pair<long double, long double>>> samples;
  int streak = 0, finite_streak = 0, power_streak = 0;
  long double prev_b = -1.0L, prev_p = 0.0L;
  bool have_prev = false;
  const long double log_frac = std::log(static_cast<long double>(opts.tail_fraction));

  for (long double lo = y0;; lo *= 2.0L) {
    const long double hi = 2.0L * lo;
    if (hi > opts.y_cap) {
      out.verdict = Verdict::Inconclusive;
      out.reason = "reached the cap y = " + fmt(static_cast<double>(opts.y_cap)) +
                   " without a conclusive tail signature";
      return out;
    }
    std::vector<std::pair<long double, long double>> pts;
    bool all_neg_inf = true;
    for (int j = 0; j <= 4; ++j) {
      const long double y = lo * std::pow(2.0L, j / 4.0L);
      const long double v = log_f(y);
      if (std::isnan(static_cast<double>(v)) || v == std::numeric_limits<long double>::infinity()) {
        out.verdict = Verdict::Inconclusive;
        out.reason = "integrand is not finite at y = " + fmt(static_cast<double>(y));
        return out;
      }
      if (v != kNegInf) all_neg_inf = false;
      pts.emplace_back(y, v);
    }
    WindowRecord w;
    w.y_lo = lo;
    w.y_hi = hi;
    w.log_mass = all_neg_inf ? kNegInf : quad::log_integrate_exp(log_f, lo, hi, 1e-10);
    const long double prev_mass = out.windows.empty() ? kNegInf : out.windows.back().log_mass;
    w.ratio = (prev_mass == kNegInf) ? kInf : static_cast<double>(std::exp(w.log_mass - prev_mass));
    out.log_accumulated = quad::log_add_exp(out.log_accumulated, w.log_mass);
    samples.push_back(pts);
    if (samples.size() > 3) samples.erase(samples.begin());

    if (all_neg_inf && out.log_accumulated != kNegInf) {
      out.windows.push_back(w);
      out.verdict = Verdict::Finite;
      out.log_tail_bound = kNegInf;
      out.reason = "integrand underflows";
      return out;
    }
    if (all_neg_inf && out.windows.size() >= 8) {
      out.windows.push_back(w);
      out.verdict = Verdict::Finite;
      out.reason = "integrand vanishes identically";
      return out;
    }

    std::vector<std::pair<long double, long double>> all;
    for (const auto& s : samples) all.insert(all.end(), s.begin(), s.end());
    const Fit fit = out.windows.empty() ? Fit{} : fit_tail(all, hi);
    out.windows.push_back(w);
    if (!fit.ok) continue;
    out.windows.back().b = static_cast<double>(fit.beta);
    out.windows.back().p = static_cast<double>(fit.p);

    const long double slack = std::max(static_cast<long double>(opts.flat_rate), 4.0L * fit.rms);
    const long double b = fit.beta / hi;
    // A poor fit widens the slack; it must not turn fitted growth into a
    // power-law tail, so the power rules also require no growth beyond rms.
    const bool not_growing = fit.beta >= -std::max(static_cast<long double>(opts.flat_rate), fit.rms);
    const long double l_end = pts.back().second;
    long double tail = std::numeric_limits<long double>::infinity();
    // Exponential regime: rate positive and not weakening.
    if (fit.beta > slack && (!have_prev || prev_b < 0.0L || b >= 0.95L * prev_b)) {
      const long double k_eff = (fit.beta + std::min(fit.p, 0.0L)) / hi;
      if (k_eff > 0.0L) tail = std::min(tail, l_end - std::log(k_eff));
    }
    // Power regime: no exponential rate, integrable and steady exponent.
    if (std::abs(fit.beta) <= slack && not_growing && fit.p > 1.0L + opts.power_tol + slack &&
        (!have_prev || fit.p >= 0.95L * prev_p)) {
      tail = std::min(tail, l_end + std::log(hi) - std::log(fit.p - 1.0L));
    }
    // A steady integrable power law whose window masses decay as 2^{1-p}
    // has a finite tail however slowly it decays.
    const bool steady_power = have_prev && std::abs(fit.beta) <= slack && not_growing &&
                              fit.p + fit.beta > 1.0L + opts.power_tol + slack &&
                              std::abs(fit.p - prev_p) <= 0.01L * std::max(1.0L, std::abs(fit.p)) &&
                              std::abs(std::log2(w.ratio) + static_cast<double>(fit.p) - 1.0) <= 0.05;
    power_streak = steady_power ? power_streak + 1 : 0;
    have_prev = true;
    prev_b = b;
    prev_p = fit.p;
    if (power_streak >= opts.power_windows) {
      out.verdict = Verdict::Finite;
      out.log_tail_bound = l_end + std::log(hi) - std::log(fit.p - 1.0L);
      out.reason = std::to_string(power_streak) + " windows of a steady integrable power law, p = " +
                   fmt(static_cast<double>(fit.p));
      return out;
    }
    // The tail test must pass on consecutive windows: a transient dip of a
    // growing integrand passes once and then fails.
    finite_streak = (tail - out.log_accumulated < log_frac) ? finite_streak + 1 : 0;
    if (finite_streak >= opts.confirm_windows) {
      out.verdict = Verdict::Finite;
      out.log_tail_bound = tail;
      out.reason = "extrapolated tail below " + fmt(opts.tail_fraction) + " of the accumulated mass";
      return out;
    }
    // Local decay exponent at the window end is p + beta.
    const bool non_integrable = fit.p + fit.beta <= 1.0L + opts.power_tol && fit.beta <= slack;
    if (non_integrable && w.ratio > opts.window_ratio)
      ++streak;
    else
      streak = 0;
    if (streak >= opts.divergent_windows) {
      out.verdict = Verdict::Divergent;
      out.reason = std::to_string(streak) + " consecutive windows with ratio > " + fmt(opts.window_ratio) +
                   " and a non-integrable tail";
      return out;
    }
  }
}

BisectionResult bisect_threshold(const std::function<Verdict(double)>& classify, double c_lo, double c_hi,
                                 int iterations, double resolution) {
  require(c_lo > 0.0 && c_hi > c_lo, "bisect_threshold: needs 0 < c_lo < c_hi");
  BisectionResult out;
  out.lo = c_lo;
  out.hi = c_hi;
  const Verdict vlo = classify(c_lo), vhi = classify(c_hi);
  if (vlo == Verdict::Inconclusive || vhi == Verdict::Inconclusive) {
    out.kind = ConstantKind::Inconclusive;
    out.reason = "end point classification inconclusive";
    return out;
  }
  if (vlo == Verdict::Finite && vhi == Verdict::Finite) {
    out.kind = ConstantKind::Zero;
    out.value = 0.0;
    out.reason = "finite over the whole bracket";
    return out;
  }
  if (vlo == Verdict::Divergent && vhi == Verdict::Divergent) {
    out.kind = ConstantKind::Infinite;
    out.value = kInf;
    out.reason = "divergent over the whole bracket";
    return out;
  }
  if (vlo == Verdict::Finite) {
    out.kind = ConstantKind::Inconclusive;
    out.reason = "finite at the lower end but divergent at the upper end";
    return out;
  }
  double lo = c_lo, hi = c_hi;
  // Close to c* the windows reach y where the integrand is rounding
  // limited; resolving c* much finer than the requested resolution costs much
  // and gains nothing.
  for (int i = 0; i < iterations && hi / lo - 1.0 >= resolution; ++i) {
    const double mid = std::sqrt(lo * hi);
    const Verdict v = classify(mid);
    out.iterations = i + 1;
    if (v == Verdict::Inconclusive) {
      out.resolution_limited = true;
      break;
    }
    (v == Verdict::Finite ? hi : lo) = mid;
  }
  out.kind = ConstantKind::Finite;
  out.lo = lo;
  out.hi = hi;
  out.value = std::sqrt(lo * hi);
  return out;
}

// ------------------------------------------------------- stationary tails

StationaryTail::StationaryTail(const SpectralSolution& sol) {
  const Grid& g = sol.grid;
  d = g.d;
  const double hd = g.cell_volume();
  const std::vector<double> phi = normalized_mode(sol.phi0, hd);
  const std::size_t n = phi.size();
  std::vector<std::pair<double, double>> rm(n);  // (radius, mass)
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r2 = 0.0;
    if (d == 1) {
      const double x = g.node(static_cast<int>(i));
      r2 = x * x;
    } else {
      const double x0 = g.node(static_cast<int>(i / g.n)), x1 = g.node(static_cast<int>(i % g.n));
      r2 = x0 * x0 + x1 * x1;
    }
    rm[i] = {std::sqrt(r2), phi[i] * phi[i] * hd};
    total += rm[i].second;
  }
  std::sort(rm.begin(), rm.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  r_cert = sol.certified_radius();
  // Unique radii ascending with G(r) = mass at radius >= r.
  std::vector<double> radii, logG;
  double acc = 0.0;
  for (std::size_t i = 0; i < n;) {
    const double r = rm[i].first;
    while (i < n && rm[i].first >= r - 1e-12 * std::max(1.0, r)) acc += rm[i++].second;
    if (r <= r_cert) {
      radii.push_back(r);
      logG.push_back(std::log(acc / total));
    }
  }
  std::reverse(radii.begin(), radii.end());
  std::reverse(logG.begin(), logG.end());
  // The mass at node radius >= r is G at the inner cell edge, midway to the
  // next smaller node radius (exact cell edges in d = 1).
  for (std::size_t i = radii.size(); i-- > 1;) radii[i] = 0.5 * (radii[i] + radii[i - 1]);
  if (!radii.empty()) radii[0] = 0.0;
  if (radii.size() < 8) throw Error(ErrorCode::WindowTooSmall, "stationary tail: certified window too small");

  // Fit a + b log s - k s^q on the outer half of the certified window.
  std::vector<std::size_t> idx;
  for (double frac : {0.5, 0.25}) {
    idx.clear();
    for (std::size_t i = 0; i < radii.size(); ++i)
      if (radii[i] >= frac * r_cert && radii[i] > 0.0) idx.push_back(i);
    if (idx.size() >= 8) break;
  }
  if (idx.size() < 4) throw Error(ErrorCode::WindowTooSmall, "stationary tail: too few points to fit");
  double best = kInf, bq = 0, bb = 0, bk = 0;
  for (double q : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) {
    const int cols = q == 0.0 ? 2 : 3;
    Eigen::MatrixXd A(idx.size(), cols);
    Eigen::VectorXd y(idx.size());
    for (std::size_t m = 0; m < idx.size(); ++m) {
      const double s = radii[idx[m]];
      A(m, 0) = 1.0;
      A(m, 1) = std::log(s);
      if (cols == 3) A(m, 2) = -std::pow(s, q);
      y(m) = logG[idx[m]];
    }
    const Eigen::VectorXd x = A.colPivHouseholderQr().solve(y);
    const double b = x(1), k = cols == 3 ? x(2) : 0.0;
    if (cols == 3 && !(k > 0.0)) continue;
    const double slope = b / r_cert - k * q * std::pow(r_cert, q - 1.0);
    if (!(slope < 0.0)) continue;
    const double res = std::sqrt((A * x - y).squaredNorm() / idx.size());
    if (res < best) {
      best = res;
      bq = q;
      bb = b;
      bk = k;
    }
  }
  if (!std::isfinite(best)) throw Error(ErrorCode::Precondition, "stationary tail: no decaying model fits");
  fit_q = bq;
  fit_b = bb;
  fit_k = bk;
  fit_residual = best;
  const double r_end = radii.back();
  const long double a = logG.back() - bb * std::log(r_end) + bk * std::pow(r_end, bq);
  std::ostringstream os;
  os << "grid tail to r = " << fmt(r_end) << ", then log G = a + " << fmt(bb) << " log s";
  if (bq > 0.0) os << " - " << fmt(bk) << " s^" << fmt(bq);
  label_ = os.str();
  fn_ = [radii, logG, a, bq, bb, bk, r_end](long double ls) -> long double {
    const long double s = std::exp(std::min(ls, 11000.0L));
    if (s <= radii.front()) return 0.0L;
    if (s >= r_end) {
      const long double pw = bq > 0.0 ? std::exp(static_cast<long double>(bq) * ls) : 0.0L;
      return a + bb * ls - bk * pw;
    }
    const auto it = std::upper_bound(radii.begin(), radii.end(), static_cast<double>(s));
    const std::size_t j = static_cast<std::size_t>(it - radii.begin());
    const long double f = (s - radii[j - 1]) / (radii[j] - radii[j - 1]);
    return (1.0L - f) * logG[j - 1] + f * logG[j];
  };
}

StationaryTail StationaryTail::gaussian(double gamma) {
  require(gamma > 0.0, "gaussian tail: gamma must be positive");
  StationaryTail t;
  t.d = 1;
  const long double lsg = 0.5L * std::log(static_cast<long double>(gamma));
  t.fn_ = [lsg](long double ls) -> long double {
    const long double lx = lsg + ls;
    if (lx > 5000.0L) return kNegInf;
    const long double x = std::exp(lx);
    if (x < 20.0L) return std::log(std::erfc(x));
    const long double x2 = x * x;
    const long double sqrt_pi = std::sqrt(std::acos(-1.0L));
    return -x2 - std::log(x * sqrt_pi) + std::log1p(-0.5L / x2 + 0.75L / (x2 * x2));
  };
  t.label_ = "erfc(sqrt(" + fmt(gamma) + ") s)";
  return t;
}

StationaryTail StationaryTail::custom(LogFn log_tail, std::string label) {
  StationaryTail t;
  t.fn_ = std::move(log_tail);
  t.label_ = std::move(label);
  return t;
}

IntegralClassification integral_test_general(const StationaryTail& tail, const ProfileFunction& tau, double c,
                                             const ClassifierOptions& opts) {
  require(c > 0.0, "integral test: c must be positive");
  const long double lc = std::log(static_cast<long double>(c));
  const int d = tail.d;
  auto log_f = [&](long double y) { return tail.log_tail(lc + tau.log_value(y)) + y - d * lc; };
  return classify_integral(log_f, std::max(1.0L, tau.log_r_min()), opts);
}

BisectionResult escape_constant_general(const StationaryTail& tail, const ProfileFunction& tau,
                                        const ClassifierOptions& opts) {
  return bisect_threshold([&](double c) { return integral_test_general(tail, tau, c, opts).verdict; });
}

// --------------------------------------------------------- profile tests

ProfileTestResult integral_test_profile(const ProfileTestSpec& spec, const ProfileFunction& tau, double c,
                                        const ClassifierOptions& opts) {
  require(c > 0.0, "integral test: c must be positive");
  const long double lc = std::log(static_cast<long double>(c));
  const int d = spec.d;
  const long double y0 = std::max(1.0L, tau.log_r_min());
  ProfileTestResult out;
  out.confining = spec.confining;
  if (spec.confining) {
    auto integrand = [&](bool low) {
      return [&, low](long double y) {
        const long double lt = tau.log_value(y);
        const long double ls = lc + lt;
        const auto [lgu, lgl] = log_g_profiles(spec.V, ls, d);
        const long double lg = low ? lgl : lgu;
        return 2.0L * (lg + spec.f.log_value_ld(ls)) + d * lt - spec.kappa.log_value(lt) + y;
      };
    };
    out.first = classify_integral(integrand(true), y0, opts);
    out.second = classify_integral(integrand(false), y0, opts);
  } else {
    auto nu = [&](long double y) {
      const long double lt = tau.log_value(y);
      return 2.0L * spec.f.log_value_ld(lc + lt) + d * lt - spec.kappa.log_value(lt) + y;
    };
    const long double rate = 2.0L * c * spec.theta * std::sqrt(std::abs(spec.lambda0) + spec.epsilon);
    auto eps = [&](long double y) {
      const long double lt = tau.log_value(y);
      if (lt > 11000.0L) return kNegInf;
      return -rate * std::exp(lt) + (d - 1) * lt + y;
    };
    out.first = classify_integral(nu, y0, opts);
    out.second = classify_integral(eps, y0, opts);
  }
  return out;
}

ProfileConstants profile_constants(const ProfileTestSpec& spec, const ProfileFunction& tau,
                                   const ClassifierOptions& opts) {
  ProfileConstants out;
  out.first = bisect_threshold([&](double c) { return integral_test_profile(spec, tau, c, opts).first.verdict; });
  out.second =
      bisect_threshold([&](double c) { return integral_test_profile(spec, tau, c, opts).second.verdict; });
  return out;
}

// --------------------------------------------------------------- catalogue

EscapeConstant escape_constant(const EscapeCase& e) {
  EscapeConstant out;
  out.regime = e.regime;
  auto set_log = [&](double lambda, double value, const std::string& text) {
    out.tau = ProfileFunction::log_power(lambda);
    out.value = value;
    out.profile = text;
  };
  auto uncatalogued = [&](const std::string& why) {
    throw Error(ErrorCode::UncataloguedRegime, "escape_constant: " + why);
  };
  if (e.regime == "ou") {
    require(e.gamma > 0.0, "escape_constant: gamma must be positive");
    set_log(2.0, 1.0 / std::sqrt(e.gamma), "sqrt(log n)");
    return out;
  }
  if (e.regime == "finite_well") {
    require(e.lambda0 < 0.0, "escape_constant: finite well needs lambda0 < 0");
    set_log(1.0, 1.0 / (2.0 * std::sqrt(2.0 * std::abs(e.lambda0))), "log n");
    return out;
  }
  if (e.regime == "regular_variation") {
    require(e.A > 0.0 && e.lambda > 0.0, "escape_constant: needs A, lambda > 0");
    set_log(e.lambda, std::pow(2.0 * e.A, -1.0 / e.lambda), "(log n)^(1/" + fmt(e.lambda) + ")");
    return out;
  }
  const ProfileClass cls = classify_profile(e.f);
  if (cls == ProfileClass::Unsupported) uncatalogued("Levy profile outside the jump-paring classes");
  const int d = e.f.d;
  if (e.regime == "confining") {
    const bool eta_on = e.eta > 0.0 && e.vartheta > 0.0;
    if (!eta_on && !(e.rho > 0.0 || e.sigma > 0.0)) uncatalogued("potential does not grow");
    if (cls == ProfileClass::L1) {
      if (eta_on) {
        set_log(e.vartheta, std::pow(2.0 * e.eta, -1.0 / e.vartheta),
                "(log n)^(1/" + fmt(e.vartheta) + ")");
        return out;
      }
      out.tau = ProfileFunction::iterated_log_power(e.f.gamma + e.rho, d, {-e.sigma}, e.delta);
      out.profile = out.tau.label();
      out.value = e.delta > 1.0 ? 0.0 : kInf;
      return out;
    }
    // L2, L3
    if (eta_on && e.vartheta > e.f.beta) {
      set_log(e.vartheta, std::pow(2.0 * e.eta, -1.0 / e.vartheta), "(log n)^(1/" + fmt(e.vartheta) + ")");
    } else if (eta_on && e.vartheta == e.f.beta) {
      set_log(e.vartheta, std::pow(2.0 * (e.f.mu + e.eta), -1.0 / e.vartheta),
              "(log n)^(1/" + fmt(e.vartheta) + ")");
    } else {
      set_log(e.f.beta, std::pow(2.0 * e.f.mu, -1.0 / e.f.beta), "(log n)^(1/" + fmt(e.f.beta) + ")");
    }
    return out;
  }
  if (e.regime == "decaying") {
    if (cls == ProfileClass::L1) {
      out.tau = ProfileFunction::iterated_log_power(e.f.gamma, d, {0.0}, e.delta);
      out.profile = out.tau.label();
      out.value = e.delta > 1.0 ? 0.0 : kInf;
      return out;
    }
    if (cls == ProfileClass::L2) {
      set_log(e.f.beta, std::pow(2.0 * e.f.mu, -1.0 / e.f.beta), "(log n)^(1/" + fmt(e.f.beta) + ")");
      return out;
    }
    if (e.low_lying) {
      set_log(1.0, 1.0 / (2.0 * e.f.mu), "log n");
      return out;
    }
    require(e.lambda0 < 0.0 && e.theta > 0.0, "escape_constant: needs lambda0 < 0 and theta > 0");
    set_log(1.0, 1.0 / (2.0 * e.theta * std::sqrt(std::abs(e.lambda0))), "log n");
    out.lower_bound = true;
    return out;
  }
  uncatalogued("unknown regime '" + e.regime + "'");
  return out;
}

// --------------------------------------------------------- empirical limsup

EmpiricalLimsup empirical_limsup(std::span<const double> abs_values, const ProfileFunction& tau,
                                 const std::vector<double>& c_grid, long long n_start, int trace_points) {
  const long long N = static_cast<long long>(abs_values.size());
  if (N < 1000) throw Error(ErrorCode::Precondition, "empirical_limsup: needs n_max >= 1000");
  EmpiricalLimsup out;
  const long long n_min = static_cast<long long>(std::ceil(static_cast<double>(std::exp(tau.log_r_min()))));
  out.n_start = std::max(n_start, std::max(1LL, n_min));
  require(out.n_start < N, "empirical_limsup: n_start must be below n_max");
  std::vector<double> t(N + 1, 0.0);
  for (long long n = out.n_start; n <= N; ++n) t[n] = tau(static_cast<double>(n));

  // Log-spaced trace of the running maximum over tau(n).
  std::vector<long long> marks;
  for (int i = 0; i < trace_points; ++i) {
    const double v = out.n_start * std::pow(static_cast<double>(N) / out.n_start,
                                            static_cast<double>(i) / (trace_points - 1));
    const long long n = std::clamp(static_cast<long long>(std::llround(v)), out.n_start, N);
    if (marks.empty() || n > marks.back()) marks.push_back(n);
  }
  double m1 = 0.0, m2 = 0.0, run = 0.0;
  std::size_t mi = 0;
  for (long long n = 1; n <= N; ++n) {
    const double a = abs_values[n - 1];
    run = std::max(run, a);
    if (a > m1) {
      m2 = m1;
      m1 = a;
    } else if (a > m2) {
      m2 = a;
    }
    if (mi < marks.size() && marks[mi] == n) {
      out.trace_n.push_back(n);
      out.trace_ratio.push_back(run / t[n]);
      ++mi;
    }
  }
  out.c_hat = run / t[N];
  const double spread = 2.0 * (m1 - m2) / t[N];
  out.band_lo = std::max(0.0, out.c_hat - spread);
  out.band_hi = out.c_hat + spread;

  out.c_grid = c_grid;
  out.exceed_count.assign(c_grid.size(), 0);
  out.last_exceed.assign(c_grid.size(), 0);
  for (std::size_t k = 0; k < c_grid.size(); ++k)
    for (long long n = out.n_start; n <= N; ++n)
      if (abs_values[n - 1] >= c_grid[k] * t[n]) {
        ++out.exceed_count[k];
        out.last_exceed[k] = n;
      }
  return out;
}

}  // namespace gstlab
