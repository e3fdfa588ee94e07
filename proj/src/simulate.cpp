#include "gstlab/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "gstlab/errors.hpp"
#include "gstlab/quadrature.hpp"

namespace gstlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& eng) {
  // 53-bit mantissa in (0, 1).
  return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

std::size_t draw_index(const std::vector<double>& cdf, std::size_t begin, std::size_t end, double u) {
  const double target = u * cdf[end - 1];
  auto it = std::upper_bound(cdf.begin() + begin, cdf.begin() + end, target);
  std::size_t k = static_cast<std::size_t>(it - cdf.begin());
  return std::min(k, end - 1) - begin;
}

}  // namespace

RngSpec RngSpec::derive(std::uint64_t index) const {
  return RngSpec{seed, splitmix64(stream ^ splitmix64(index + 0x632be59bd9b4e019ULL))};
}

std::mt19937_64 RngSpec::engine() const {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

std::vector<double> sample_stationary(const SpectralSolution& sol, std::size_t n, const RngSpec& rng) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "sample_stationary: n must be >= 1");
  const StationaryDensity dens = stationary_density(sol);
  const Grid& g = sol.grid;
  const double h = g.spacing();
  auto eng = rng.engine();
  std::vector<double> out;
  out.reserve(n * g.d);
  if (g.d == 1) {
    std::vector<double> cdf(dens.mass.size());
    std::partial_sum(dens.mass.begin(), dens.mass.end(), cdf.begin());
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t j = draw_index(cdf, 0, cdf.size(), uniform01(eng));
      out.push_back(g.node(static_cast<int>(j)) + (uniform01(eng) - 0.5) * h);
    }
    return out;
  }
  // d = 2: first coordinate from its marginal, second from the conditional row.
  const int m = g.n;
  std::vector<double> row_cdf(static_cast<std::size_t>(m) * m), marg(m);
  for (int a = 0; a < m; ++a) {
    double s = 0.0;
    for (int b = 0; b < m; ++b) {
      s += dens.mass[static_cast<std::size_t>(a) * m + b];
      row_cdf[static_cast<std::size_t>(a) * m + b] = s;
    }
    marg[a] = s;
  }
  std::vector<double> marg_cdf(m);
  std::partial_sum(marg.begin(), marg.end(), marg_cdf.begin());
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t a = draw_index(marg_cdf, 0, m, uniform01(eng));
    const std::size_t b = draw_index(row_cdf, a * m, (a + 1) * m, uniform01(eng));
    out.push_back(g.node(static_cast<int>(a)) + (uniform01(eng) - 0.5) * h);
    out.push_back(g.node(static_cast<int>(b)) + (uniform01(eng) - 0.5) * h);
  }
  return out;
}

std::function<double(double)> grid_cdf(const SpectralSolution& sol) {
  if (sol.grid.d != 1) throw Error(ErrorCode::InvalidArgument, "grid_cdf: d = 1 only");
  const StationaryDensity dens = stationary_density(sol);
  std::vector<double> cum(dens.mass.size() + 1, 0.0);
  for (std::size_t i = 0; i < dens.mass.size(); ++i) cum[i + 1] = cum[i] + dens.mass[i];
  const Grid g = sol.grid;
  return [g, cum](double x) {
    const double u = (x + g.half_width) / g.spacing();
    if (u <= 0.0) return 0.0;
    if (u >= g.n) return 1.0;
    const int j = static_cast<int>(u);
    return cum[j] + (u - j) * (cum[j + 1] - cum[j]);
  };
}

KernelChain::KernelChain(const IntrinsicKernel& k, const Grid& grid)
    : t_(k.t), grid_(grid), nodes_(k.nodes) {
  if (grid.d != 1) throw Error(ErrorCode::InvalidArgument, "kernel chain: d = 1 only");
  const std::size_t w = nodes_.size();
  cdf_.resize(w * w);
  for (std::size_t i = 0; i < w; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < w; ++j) {
      s += k.u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * k.weights[j];
      cdf_[i * w + j] = s;
    }
    if (!(s > 0.0)) throw Error(ErrorCode::Normalization, "kernel chain: empty transition row");
  }
  mass_.assign(k.weights.begin(), k.weights.end());
  const double total = std::accumulate(mass_.begin(), mass_.end(), 0.0);
  for (auto& m : mass_) m /= total;
  mass_cdf_.resize(w);
  std::partial_sum(mass_.begin(), mass_.end(), mass_cdf_.begin());
}

std::size_t KernelChain::window_index(double x) const {
  const int j = static_cast<int>(std::lround((x + grid_.half_width) / grid_.spacing() - 0.5));
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), static_cast<std::size_t>(std::max(j, 0)));
  if (j < 0 || it == nodes_.end() || *it != static_cast<std::size_t>(j)) {
    std::ostringstream os;
    os << "kernel chain: start point " << x << " is outside the kernel window";
    throw Error(ErrorCode::OutsideWindow, os.str());
  }
  return static_cast<std::size_t>(it - nodes_.begin());
}

double KernelChain::position(std::size_t w) const { return grid_.node(static_cast<int>(nodes_[w])); }

std::size_t KernelChain::sample_stationary_index(std::mt19937_64& eng) const {
  return draw_index(mass_cdf_, 0, mass_cdf_.size(), uniform01(eng));
}

std::size_t KernelChain::step(std::size_t w, std::mt19937_64& eng) const {
  const std::size_t n = nodes_.size();
  return draw_index(cdf_, w * n, (w + 1) * n, uniform01(eng));
}

GstPath KernelChain::run(double x0, long long n_steps, const RngSpec& rng) const {
  auto eng = rng.engine();
  std::size_t w = window_index(x0);
  GstPath p;
  p.times.reserve(n_steps + 1);
  p.states.reserve(n_steps + 1);
  for (long long k = 0; k <= n_steps; ++k) {
    if (k > 0) w = step(w, eng);
    const double x = position(w);
    p.times.push_back(k * t_);
    p.states.push_back(x);
    p.max_abs_state = std::max(p.max_abs_state, std::abs(x));
  }
  return p;
}

GstPath simulate_chain(const IntrinsicKernel& kernel, const Grid& grid, double x0, long long n_steps,
                       const RngSpec& rng) {
  return KernelChain(kernel, grid).run(x0, n_steps, rng);
}

JumpTail::JumpTail(const LevyModel& model, double r_min, double r_max) {
  if (!model.has_jumps()) throw Error(ErrorCode::InvalidArgument, "jump tail: model has no jumps");
  constexpr int kPoints = 2000;
  std::vector<double> r;
  const double q = std::log(r_max / r_min) / kPoints;
  for (int k = 0; k <= kPoints; ++k) r.push_back(r_min * std::exp(q * k));
  if (r_min < 1.0 && r_max > 1.0) r.push_back(1.0);
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  auto nu = [&](double s) { return model.levy_density(s); };
  std::vector<double> n(r.size());
  n.back() = quad::integrate(nu, r.back(), std::numeric_limits<double>::infinity(), {0.0, 1e-10}).value;
  for (std::size_t k = r.size() - 1; k-- > 0;) {
    const std::vector<double> br = (r[k] < 1.0 && r[k + 1] > 1.0) ? std::vector<double>{1.0}
                                                                    : std::vector<double>{};
    n[k] = n[k + 1] + quad::integrate(nu, r[k], r[k + 1], {0.0, 1e-10}, br).value;
  }
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (!(n[k] > 0.0)) break;
    logr_.push_back(std::log(r[k]));
    logn_.push_back(std::log(n[k]));
  }
  if (logr_.size() < 2) throw Error(ErrorCode::InvalidArgument, "jump tail: tail mass vanishes");
}

double JumpTail::tail(double r) const {
  if (std::isinf(r)) return 0.0;
  const double lr = std::log(r);
  const std::size_t m = logr_.size();
  std::size_t k;
  if (lr <= logr_.front())
    k = 0;
  else if (lr >= logr_.back())
    k = m - 2;
  else
    k = static_cast<std::size_t>(std::upper_bound(logr_.begin(), logr_.end(), lr) - logr_.begin()) - 1;
  const double s = (logn_[k + 1] - logn_[k]) / (logr_[k + 1] - logr_[k]);
  return std::exp(logn_[k] + s * (lr - logr_[k]));
}

double JumpTail::inverse(double n) const {
  const double ln = std::log(n);
  const std::size_t m = logn_.size();
  std::size_t k;
  if (ln >= logn_.front()) {
    k = 0;
  } else if (ln <= logn_.back()) {
    k = m - 2;
  } else {
    // logn_ is decreasing.
    auto it = std::upper_bound(logn_.begin(), logn_.end(), ln, std::greater<double>());
    k = static_cast<std::size_t>(it - logn_.begin()) - 1;
  }
  const double s = (logn_[k + 1] - logn_[k]) / (logr_[k + 1] - logr_[k]);
  return std::exp(logr_[k] + (ln - logn_[k]) / s);
}

SdeSampler::SdeSampler(const GstFields& fields, double dt, const SdeOptions& opts)
    : fields_(fields), dt_(dt), opts_(opts) {
  const Phi0Interpolant& phi = fields_.phi0();
  const Grid& g = phi.grid();
  const double h = g.spacing();
  r_cert_ = phi.certified_radius();
  eps_ = fields_.eps_jump();
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "simulate_sde: dt must be positive");
  double max_drift = 0.0;
  for (int j = 0; j < g.n; ++j)
    if (std::abs(g.node(j)) <= r_cert_)
      max_drift = std::max(max_drift, std::abs(fields_.sde_drift(g.node(j))));
  dt_max_ = max_drift > 0.0 ? opts.dt_factor * h / max_drift : std::numeric_limits<double>::infinity();
  if (dt > dt_max_) {
    std::ostringstream os;
    os << "simulate_sde: dt = " << dt << " exceeds dt_max = " << dt_max_
       << " (drift step larger than " << opts.dt_factor << " grid spacings)";
    throw Error(ErrorCode::DtTooLarge, os.str());
  }
  if (!fields_.model().has_jumps()) return;

  const auto& lp = phi.log_nodes();
  const int n = g.n;
  const int B = std::max(1, opts.block);
  for (int a = 0; a < n - 1; a += B) {
    const int b = std::min(a + B, n - 1);
    Block blk;
    blk.lo = g.node(a);
    blk.hi = g.node(b);
    blk.width = blk.hi - blk.lo;
    blk.log_max = *std::max_element(lp.begin() + a, lp.begin() + b + 1);
    blk.log_min = *std::min_element(lp.begin() + a, lp.begin() + b + 1);
    blocks_.push_back(blk);
  }
  const double inf = std::numeric_limits<double>::infinity();
  blocks_.push_back({-inf, g.node(0), lp.front(), -inf, inf});
  blocks_.push_back({g.node(n - 1), inf, lp.back(), -inf, inf});
  tail_ = std::make_shared<JumpTail>(fields_.model(), 0.5 * eps_, 8.0 * g.half_width);

  const std::size_t nb = blocks_.size();
  const std::size_t ns = nb - 2;  // sources are interior blocks
  qcdf_.assign(ns * nb, 0.0);
  qtot_.assign(ns, 0.0);
  for (std::size_t s = 0; s < ns; ++s) {
    const Block& src = blocks_[s];
    double acc = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      const Block& dst = blocks_[b];
      double lam;
      if (b == s) {
        lam = 2.0 * tail_->mass(eps_, eps_ + src.width);
      } else {
        const double gap = std::max({0.0, dst.lo - src.hi, src.lo - dst.hi});
        const double lo = std::max(gap, eps_);
        lam = tail_->mass(lo, lo + dst.width);
      }
      acc += lam * std::exp(dst.log_max - src.log_min);
      qcdf_[s * nb + b] = acc;
    }
    qtot_[s] = acc;
  }
}

int SdeSampler::block_of(double x) const {
  const Grid& g = fields_.phi0().grid();
  int j = static_cast<int>(std::floor((x + g.half_width) / g.spacing() - 0.5));
  j = std::clamp(j, 0, g.n - 2);
  return j / std::max(1, opts_.block);
}

double SdeSampler::exact_mass(double x, const Block& b) const {
  double m = 0.0;
  const double r0 = std::max(b.lo, x + eps_);
  if (b.hi > r0) m += tail_->tail(r0 - x) - tail_->tail(b.hi - x);
  const double l1 = std::min(b.hi, x - eps_);
  if (l1 > b.lo) m += tail_->tail(x - l1) - tail_->tail(x - b.lo);
  return std::max(m, 0.0);
}

double SdeSampler::sample_in_block(double x, const Block& b, std::mt19937_64& eng) const {
  double mr = 0.0, ml = 0.0, r_lo = 0, r_hi = 0, l_lo = 0, l_hi = 0;
  const double r0 = std::max(b.lo, x + eps_);
  if (b.hi > r0) {
    r_lo = r0 - x;
    r_hi = b.hi - x;
    mr = tail_->tail(r_lo) - tail_->tail(r_hi);
  }
  const double l1 = std::min(b.hi, x - eps_);
  if (l1 > b.lo) {
    l_lo = x - l1;
    l_hi = x - b.lo;
    ml = tail_->tail(l_lo) - tail_->tail(l_hi);
  }
  const bool right = uniform01(eng) * (mr + ml) < mr;
  const double dlo = right ? r_lo : l_lo, dhi = right ? r_hi : l_hi;
  const double nlo = tail_->tail(dlo), nhi = tail_->tail(dhi);
  double dist = tail_->inverse(nlo - uniform01(eng) * (nlo - nhi));
  dist = std::clamp(dist, dlo, dhi);
  return right ? x + dist : x - dist;
}

GstPath SdeSampler::run(double x0, double T, const RngSpec& rng) const {
  const long long steps = std::llround(T / dt_);
  const long long rec = std::max(1LL, std::llround(opts_.record_every / dt_));
  if (std::abs(steps * dt_ - T) > 1e-9 * std::max(1.0, T))
    throw Error(ErrorCode::InvalidArgument, "simulate_sde: T must be a multiple of dt");
  if (std::abs(rec * dt_ - opts_.record_every) > 1e-9 * std::max(1.0, opts_.record_every))
    throw Error(ErrorCode::InvalidArgument, "simulate_sde: record spacing must be a multiple of dt");
  auto eng = rng.engine();
  std::normal_distribution<double> normal(0.0, 1.0);
  const Phi0Interpolant& phi = fields_.phi0();
  const double sd = std::sqrt(fields_.effective_sigma2() * dt_);
  const bool jumps = fields_.model().has_jumps();
  const std::size_t nb = blocks_.size();

  GstPath p;
  auto clamp = [&](double& x) {
    if (std::abs(x) > r_cert_) {
      x = std::copysign(r_cert_, x);
      ++p.clamp_count;
    }
  };
  double x = x0;
  clamp(x);
  auto record = [&](double t) {
    p.times.push_back(t);
    p.states.push_back(x);
  };
  record(0.0);
  for (long long k = 0; k < steps; ++k) {
    const double t = k * dt_;
    if (jumps) {
      double remaining = dt_;
      while (true) {
        const int s = block_of(x);
        const double Q = qtot_[s];
        const double wait = -std::log(uniform01(eng)) / Q;
        if (wait >= remaining) break;
        remaining -= wait;
        const double u = uniform01(eng);
        const std::size_t b = draw_index(qcdf_, s * nb, (s + 1) * nb, u);
        const double qb = qcdf_[s * nb + b] - (b > 0 ? qcdf_[s * nb + b - 1] : 0.0);
        ++p.proposals;
        const double m = exact_mass(x, blocks_[b]);
        if (!(m > 0.0)) continue;
        const double y = sample_in_block(x, blocks_[b], eng);
        const double acc = std::exp(phi.log_value(y) - phi.log_value(x)) * m / qb;
        if (acc > 1.0 + 1e-9) {
          std::ostringstream os;
          os << "simulate_sde: envelope violation (acceptance " << acc << " at x = " << x << ")";
          throw Error(ErrorCode::Precondition, os.str());
        }
        const bool accepted = uniform01(eng) < acc;
        if (opts_.log_jumps) p.jump_log.push_back({t + dt_ - remaining, x, y - x, accepted});
        if (accepted) {
          ++p.accepted;
          x = y;
          clamp(x);
        }
      }
    }
    x += fields_.sde_drift(x) * dt_ + sd * normal(eng);
    clamp(x);
    p.max_abs_state = std::max(p.max_abs_state, std::abs(x));
    if ((k + 1) % rec == 0) record((k + 1) * dt_);
  }
  return p;
}

GstPath simulate_sde(const GstFields& fields, double x0, double dt, double T, const RngSpec& rng,
                     const SdeOptions& opts) {
  return SdeSampler(fields, dt, opts).run(x0, T, rng);
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& f) {
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (nt <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < nt; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = cdf(x[i]);
    d = std::max({d, (i + 1) / n - F, F - i / n});
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

double ks_discrete(const std::vector<std::size_t>& samples, const std::vector<double>& mass) {
  std::vector<double> counts(mass.size(), 0.0);
  for (std::size_t s : samples) counts.at(s) += 1.0;
  const double n = static_cast<double>(samples.size());
  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  double fe = 0.0, ft = 0.0, d = 0.0;
  for (std::size_t k = 0; k < mass.size(); ++k) {
    fe += counts[k] / n;
    ft += mass[k] / total;
    d = std::max(d, std::abs(fe - ft));
  }
  return d;
}

double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

double ks_critical_two_sample_1pct(std::size_t n, std::size_t m) {
  const double a = static_cast<double>(n), b = static_cast<double>(m);
  return 1.628 * std::sqrt((a + b) / (a * b));
}

}  // namespace gstlab
