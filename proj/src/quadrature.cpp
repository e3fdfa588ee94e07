#include "gstlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include "gstlab/errors.hpp"

namespace gstlab {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::QuadratureFailure: return "quadrature-failure";
    case ErrorCode::NoBoundState: return "no-bound-state";
    case ErrorCode::EigenNonConvergence: return "eigensolver-non-convergence";
    case ErrorCode::SignChange: return "ground-state-sign-change";
    case ErrorCode::Truncation: return "truncation-error";
    case ErrorCode::Normalization: return "normalization-defect";
    case ErrorCode::OutsideWindow: return "outside-certified-window";
    case ErrorCode::WindowTooSmall: return "window-too-small";
    case ErrorCode::Precondition: return "precondition";
    case ErrorCode::DtTooLarge: return "dt-too-large";
    case ErrorCode::Inconclusive: return "inconclusive";
    case ErrorCode::UncataloguedRegime: return "uncatalogued-regime";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

namespace quad {
namespace {

constexpr std::size_t kMaxPanels = 4096;

// One 61-point Kronrod panel. Boost's own error output is left in the units
// of the reference interval [-1, 1], so it is rescaled here by (hi - lo) / 2;
// its recursive driver compares that unscaled error against a scaled
// tolerance and is therefore not used.
template <class Real, class F>
std::pair<Real, Real> panel(const F& f, Real lo, Real hi) {
  using GK = boost::math::quadrature::gauss_kronrod<Real, 61>;
  Real err = 0;
  Real v = GK::integrate(f, lo, hi, 0, Real(0), &err);
  return {v, err * (hi - lo) / 2};
}

// Global adaptive bisection over the finite panels [pts[i], pts[i+1]]:
// the panel with the largest error is split until the summed error meets
// max(abs_tol, rel_tol * |value|) or the panel budget runs out. A lineage
// whose error has not dropped for kStrikes consecutive splits is at the
// rounding floor of the integrand and is retired from further splitting.
template <class Real, class F>
std::pair<Real, Real> adaptive(const F& f, const std::vector<Real>& pts, Real abs_tol,
                               Real rel_tol) {
  constexpr int kStrikes = 3;
  struct Panel { Real lo, hi, v, e; int strikes; };
  auto by_error = [](const Panel& x, const Panel& y) { return x.e < y.e; };
  std::vector<Panel> heap;
  Real value = 0, error = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (!(pts[i + 1] > pts[i])) continue;
    auto [v, e] = panel<Real>(f, pts[i], pts[i + 1]);
    heap.push_back({pts[i], pts[i + 1], v, e, 0});
    value += v;
    error += e;
  }
  std::make_heap(heap.begin(), heap.end(), by_error);
  std::vector<Panel> retired;
  using std::abs;
  while (!heap.empty() && heap.size() + retired.size() < kMaxPanels &&
         error > std::max(abs_tol, rel_tol * abs(value))) {
    std::pop_heap(heap.begin(), heap.end(), by_error);
    Panel p = heap.back();
    heap.pop_back();
    const Real mid = p.lo + (p.hi - p.lo) / 2;
    if (!(mid > p.lo && mid < p.hi) || p.strikes >= kStrikes) {
      retired.push_back(p);
      continue;
    }
    auto [v1, e1] = panel<Real>(f, p.lo, mid);
    auto [v2, e2] = panel<Real>(f, mid, p.hi);
    value += v1 + v2 - p.v;
    error += e1 + e2 - p.e;
    const int strikes = e1 + e2 < p.e ? 0 : p.strikes + 1;
    heap.push_back({p.lo, mid, v1, e1, strikes});
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back({mid, p.hi, v2, e2, strikes});
    std::push_heap(heap.begin(), heap.end(), by_error);
  }
  heap.insert(heap.end(), retired.begin(), retired.end());
  // Recompute the totals to shed the drift of the running updates.
  value = 0;
  error = 0;
  for (const Panel& p : heap) {
    value += p.v;
    error += p.e;
  }
  return {value, error};
}

Result piecewise(const Fn& f, double a, double b, Tolerance tol,
                 std::span<const double> breaks) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> pts{a};
  for (double x : breaks)
    if (x > a && x < b) pts.push_back(x);
  std::sort(pts.begin() + 1, pts.end());
  pts.push_back(b);
  // Infinite ends map to [0, 1) via x = c +- t / (1 - t).
  const bool lo_inf = a == -kInf, hi_inf = b == kInf;
  if (lo_inf && hi_inf && pts.size() == 2) pts.insert(pts.begin() + 1, 0.0);
  const double left = pts[1], right = pts[pts.size() - 2];
  std::vector<double> inner(pts.begin() + (lo_inf ? 1 : 0), pts.end() - (hi_inf ? 1 : 0));
  const Tolerance share{tol.abs / 4, tol.rel / 4};
  Result out;
  auto add = [&](std::pair<double, double> r) {
    out.value += r.first;
    out.error += r.second;
  };
  if (inner.size() >= 2) add(adaptive<double>(f, inner, share.abs, share.rel));
  if (hi_inf) {
    auto g = [&](double t) {
      const double u = 1.0 - t;
      return f(right + t / u) / (u * u);
    };
    add(adaptive<double>(g, {0.0, 1.0}, share.abs, share.rel));
  }
  if (lo_inf) {
    auto g = [&](double t) {
      const double u = 1.0 - t;
      return f(left - t / u) / (u * u);
    };
    add(adaptive<double>(g, {0.0, 1.0}, share.abs, share.rel));
  }
  return out;
}

}  // namespace

Result integrate_unchecked(const Fn& f, double a, double b, Tolerance tol,
                           std::span<const double> breaks) {
  if (a == b) return {};
  if (a > b) {
    Result r = piecewise(f, b, a, tol, breaks);
    r.value = -r.value;
    return r;
  }
  return piecewise(f, a, b, tol, breaks);
}

Result integrate(const Fn& f, double a, double b, Tolerance tol,
                 std::span<const double> breaks) {
  Result r = integrate_unchecked(f, a, b, tol, breaks);
  double target = std::max(tol.abs, tol.rel * std::abs(r.value));
  if (!std::isfinite(r.value) || r.error > target) {
    std::ostringstream os;
    os << "adaptive quadrature on [" << a << ", " << b << "] reached error "
       << r.error << " > requested " << target;
    throw QuadratureError(os.str(), r.error);
  }
  return r;
}

namespace {

boost::math::quadrature::ooura_fourier_cos<double>& cos_rule() {
  thread_local boost::math::quadrature::ooura_fourier_cos<double> rule(1e-10, 8);
  return rule;
}
boost::math::quadrature::ooura_fourier_sin<double>& sin_rule() {
  thread_local boost::math::quadrature::ooura_fourier_sin<double> rule(1e-10, 8);
  return rule;
}

}  // namespace

// cos(w(a+t)) = cos(wa)cos(wt) - sin(wa)sin(wt)
Result cos_tail(const Fn& g, double a, double w) {
  auto h = [&](double t) { return g(a + t); };
  auto [c, ec] = cos_rule().integrate(h, w);
  auto [s, es] = sin_rule().integrate(h, w);
  double ca = std::cos(w * a), sa = std::sin(w * a);
  return {ca * c - sa * s, std::abs(ec * c) + std::abs(es * s)};
}

Result sin_tail(const Fn& g, double a, double w) {
  auto h = [&](double t) { return g(a + t); };
  auto [c, ec] = cos_rule().integrate(h, w);
  auto [s, es] = sin_rule().integrate(h, w);
  double ca = std::cos(w * a), sa = std::sin(w * a);
  return {sa * c + ca * s, std::abs(ec * c) + std::abs(es * s)};
}

long double log_add_exp(long double a, long double b) {
  if (a == -std::numeric_limits<long double>::infinity()) return b;
  if (b == -std::numeric_limits<long double>::infinity()) return a;
  long double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

long double log_integrate_exp(const std::function<long double(long double)>& logf,
                              long double a, long double b, double rel) {
  constexpr long double kNegInf = -std::numeric_limits<long double>::infinity();
  if (!(b > a)) return kNegInf;
  // Shift by the largest sampled value so the exponentiated integrand is O(1).
  long double m = kNegInf;
  constexpr int kProbe = 17;
  for (int i = 0; i <= kProbe; ++i) {
    long double y = a + (b - a) * (static_cast<long double>(i) / kProbe);
    long double v = logf(y);
    if (std::isfinite(static_cast<double>(v))) m = std::max(m, v);
  }
  if (m == kNegInf) return kNegInf;
  auto h = [&](long double y) {
    long double v = logf(y) - m;
    return v < -11000.0L ? 0.0L : std::exp(v);
  };
  const long double v =
      adaptive<long double>(h, {a, b}, 0.0L, static_cast<long double>(rel)).first;
  if (!(v > 0.0L)) return kNegInf;
  return m + std::log(v);
}

}  // namespace quad
}  // namespace gstlab
