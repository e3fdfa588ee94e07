#include "gstlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <fftw3.h>

#include "gstlab/config.hpp"
#include "gstlab/eigensolver.hpp"
#include "gstlab/errors.hpp"
#include "gstlab/quadrature.hpp"

namespace gstlab {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr double kPi = std::numbers::pi;

// Conditioning constant of the Fourier part of the preconditioner.
constexpr double kPrecondShift = 10.0;

}  // namespace

struct Operator::Impl {
  Grid grid;
  LevyModel model;
  Potential V;
  std::vector<double> vvals;
  std::vector<double> mult;
  std::size_t n_complex = 0;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  std::uint64_t hash = 0;

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }

  void multiply(std::span<const double> m, std::span<const double> in, std::span<double> out) const {
    const std::size_t N = grid.size();
    std::vector<double> buf(in.begin(), in.end());
    std::vector<std::complex<double>> spec(n_complex);
    fftw_execute_dft_r2c(fwd, buf.data(), reinterpret_cast<fftw_complex*>(spec.data()));
    const double scale = 1.0 / static_cast<double>(N);
    for (std::size_t k = 0; k < n_complex; ++k) spec[k] *= m[k] * scale;
    fftw_execute_dft_c2r(bwd, reinterpret_cast<fftw_complex*>(spec.data()), out.data());
  }
};

namespace {

double cell_average_1d(const Potential& V, double x, double h) {
  std::vector<double> br;
  for (double k : V.kinks()) {
    br.push_back(k);
    br.push_back(-k);
  }
  br.push_back(0.0);
  auto f = [&](double y) { return V.at(y); };
  return quad::integrate(f, x - 0.5 * h, x + 0.5 * h, {1e-12, 1e-10}, br).value / h;
}

double cell_average_2d(const Potential& V, double x0, double x1, double h) {
  // 8x8 Gauss-Legendre per cell.
  static const double gx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
  static const double gw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                               0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  double s = 0.0;
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      double y[2] = {x0 + 0.5 * h * gx[a], x1 + 0.5 * h * gx[b]};
      s += gw[a] * gw[b] * V(y);
    }
  return s / 4.0;
}

}  // namespace

std::vector<double> normalized_mode(const std::vector<double>& v, double cell_volume) {
  double s = 0.0;
  for (double x : v) s += x * x;
  const double nrm = std::sqrt(s * cell_volume);
  if (!(nrm > 0.0) || !std::isfinite(nrm))
    throw Error(ErrorCode::Normalization, "mode has zero or non-finite norm");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / nrm;
  return out;
}

Operator::Operator(const LevyModel& model, const Potential& V, const Grid& grid) {
  grid.validate();
  if (model.dim() != grid.d)
    throw Error(ErrorCode::InvalidArgument, "build_operator: model and grid dimensions differ");
  if (!V.is_radial() && grid.d != 1)
    throw Error(ErrorCode::InvalidArgument, "build_operator: custom potentials are d = 1 only");
  auto impl = std::make_shared<Impl>();
  impl->grid = grid;
  impl->model = model;
  impl->V = V;
  const int n = grid.n;
  const double h = grid.spacing();
  const std::size_t N = grid.size();
  const double dk = kPi / grid.half_width;

  impl->vvals.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    double x[2];
    grid.position(i, x);
    if (V.needs_cell_average())
      impl->vvals[i] = grid.d == 1 ? cell_average_1d(V, x[0], h) : cell_average_2d(V, x[0], x[1], h);
    else
      impl->vvals[i] = V(std::span<const double>(x, grid.d));
    if (!std::isfinite(impl->vvals[i]))
      throw Error(ErrorCode::InvalidArgument, "build_operator: potential is not finite on the grid");
  }

  if (grid.d == 1) {
    impl->n_complex = n / 2 + 1;
    impl->mult.resize(impl->n_complex);
    for (int k = 0; k <= n / 2; ++k) impl->mult[k] = model.symbol(k * dk);
  } else {
    const int nc = n / 2 + 1;
    impl->n_complex = static_cast<std::size_t>(n) * nc;
    impl->mult.resize(impl->n_complex);
    // The symbol is radial: evaluate once per distinct k0^2 + k1^2.
    std::vector<double> cache(static_cast<std::size_t>(n / 2) * (n / 2) * 2 + 1,
                              std::numeric_limits<double>::quiet_NaN());
    for (int a = 0; a < n; ++a) {
      int k0 = a <= n / 2 ? a : a - n;
      for (int b = 0; b < nc; ++b) {
        std::size_t key = static_cast<std::size_t>(k0 * k0 + b * b);
        if (std::isnan(cache[key])) cache[key] = model.symbol(dk * std::sqrt(static_cast<double>(key)));
        impl->mult[static_cast<std::size_t>(a) * nc + b] = cache[key];
      }
    }
  }

  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    std::vector<double> r(N);
    std::vector<std::complex<double>> c(impl->n_complex);
    auto* cp = reinterpret_cast<fftw_complex*>(c.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (grid.d == 1) {
      impl->fwd = fftw_plan_dft_r2c_1d(n, r.data(), cp, flags);
      impl->bwd = fftw_plan_dft_c2r_1d(n, cp, r.data(), flags);
    } else {
      impl->fwd = fftw_plan_dft_r2c_2d(n, n, r.data(), cp, flags);
      impl->bwd = fftw_plan_dft_c2r_2d(n, n, cp, r.data(), flags);
    }
  }
  impl->hash = model_potential_hash(model, V);
  impl_ = std::move(impl);
}

const Grid& Operator::grid() const { return impl_->grid; }
const LevyModel& Operator::model() const { return impl_->model; }
const Potential& Operator::potential() const { return impl_->V; }
std::span<const double> Operator::potential_values() const { return impl_->vvals; }
std::span<const double> Operator::multiplier() const { return impl_->mult; }
std::uint64_t Operator::model_hash() const { return impl_->hash; }

void Operator::apply_multiplier(std::span<const double> m, std::span<const double> in,
                                std::span<double> out) const {
  impl_->multiply(m, in, out);
}

void Operator::apply_kinetic(std::span<const double> in, std::span<double> out) const {
  impl_->multiply(impl_->mult, in, out);
}

void Operator::apply(std::span<const double> in, std::span<double> out) const {
  impl_->multiply(impl_->mult, in, out);
  const auto& v = impl_->vvals;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] += v[i] * in[i];
}

Eigen::MatrixXd Operator::dense_matrix() const {
  const Grid& g = impl_->grid;
  if (g.d != 1) throw Error(ErrorCode::InvalidArgument, "dense_matrix: d = 1 only");
  const int n = g.n;
  const auto& m = impl_->mult;
  // K(j) = (1/n)[psi_0 + 2 sum_{0<k<n/2} psi_k cos(2 pi k j / n) + psi_{n/2} (-1)^j]
  std::vector<double> K(n);
  for (int j = 0; j < n; ++j) {
    double s = m[0] + ((j % 2 == 0) ? m[n / 2] : -m[n / 2]);
    for (int k = 1; k < n / 2; ++k) s += 2.0 * m[k] * std::cos(2.0 * kPi * k * j / n);
    K[j] = s / n;
  }
  Eigen::MatrixXd H(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) H(i, j) = K[((i - j) % n + n) % n];
  for (int i = 0; i < n; ++i) H(i, i) += impl_->vvals[i];
  return H;
}

Operator build_operator(const LevyModel& model, const Potential& V, const Grid& grid) {
  return Operator(model, V, grid);
}

double SpectralSolution::max_phi0() const {
  return phi0.empty() ? 0.0 : *std::max_element(phi0.begin(), phi0.end());
}

double SpectralSolution::certified_radius() const {
  const double M = max_phi0();
  const double threshold = 1e3 * M * std::max(boundary_ratio, noise_floor);
  // Smallest radius at which phi0 drops below the threshold.
  double r_fail = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < phi0.size(); ++i)
    if (phi0[i] <= threshold) r_fail = std::min(r_fail, grid.radius(i));
  if (!std::isfinite(r_fail)) return grid.half_width - 0.5 * grid.spacing();
  // Largest node radius strictly inside r_fail.
  double best = 0.0;
  for (std::size_t i = 0; i < phi0.size(); ++i) {
    double r = grid.radius(i);
    if (r < r_fail) best = std::max(best, r);
  }
  return best;
}

namespace {

double boundary_ratio_of(const Grid& g, const std::vector<double>& phi, double M) {
  double b = 0.0;
  const int n = g.n;
  if (g.d == 1) {
    b = std::max(std::abs(phi[0]), std::abs(phi[n - 1]));
  } else {
    for (int j = 0; j < n; ++j) {
      b = std::max({b, std::abs(phi[j]), std::abs(phi[static_cast<std::size_t>(n - 1) * n + j]),
                    std::abs(phi[static_cast<std::size_t>(j) * n]),
                    std::abs(phi[static_cast<std::size_t>(j) * n + n - 1])});
    }
  }
  return b / M;
}

void fix_mode_sign(std::vector<double>& v) {
  std::size_t imax = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[imax]) * (1.0 + 1e-9)) imax = i;
  if (v[imax] < 0.0)
    for (auto& x : v) x = -x;
}

}  // namespace

SpectralSolution ground_state(const Operator& op, const SolveOptions& opts) {
  const Grid& g = op.grid();
  const std::size_t N = g.size();
  const double hd = g.cell_volume();
  auto vv = op.potential_values();
  const double sigma = *std::min_element(vv.begin(), vv.end()) - 1.0;

  std::vector<double> W(N), S(N), pmult(op.multiplier().size());
  for (std::size_t i = 0; i < N; ++i) {
    W[i] = vv[i] - sigma;
    S[i] = std::sqrt(kPrecondShift / (W[i] + kPrecondShift));
  }
  auto m = op.multiplier();
  for (std::size_t k = 0; k < m.size(); ++k) pmult[k] = 1.0 / (m[k] + kPrecondShift);

  LinearMap H = [&](std::span<const double> in, std::span<double> out) { op.apply(in, out); };
  LinearMap A = [&](std::span<const double> in, std::span<double> out) {
    op.apply(in, out);
    for (std::size_t i = 0; i < N; ++i) out[i] -= sigma * in[i];
  };
  std::vector<double> tmp(N);
  LinearMap M = [&](std::span<const double> in, std::span<double> out) {
    for (std::size_t i = 0; i < N; ++i) tmp[i] = S[i] * in[i];
    op.apply_multiplier(pmult, tmp, out);
    for (std::size_t i = 0; i < N; ++i) out[i] *= S[i];
  };
  LinearMap inverse = [&](std::span<const double> in, std::span<double> out) {
    pcg(A, M, in, out, 1e-10, 3000);
  };

  EigenOptions eo;
  eo.n_eigen = std::max(2, opts.n_modes);
  eo.tol = opts.tol;
  eo.seed = opts.seed;
  EigenResult er = smallest_eigenpairs(H, inverse, N, eo);

  SpectralSolution sol;
  sol.grid = g;
  sol.model_hash = op.model_hash();
  sol.eigenvalues = er.values;
  const double inv_sqrt_h = 1.0 / std::sqrt(hd);
  for (auto& v : er.vectors) {
    for (auto& x : v) x *= inv_sqrt_h;
    fix_mode_sign(v);
    sol.modes.push_back(std::move(v));
  }
  sol.lambda0 = er.values[0];
  sol.lambda1 = er.values[1];
  sol.residual = er.residuals[0] / std::max(1.0, std::abs(sol.lambda0));

  std::vector<double>& phi = sol.modes[0];
  double sum = 0.0;
  for (double x : phi) sum += x;
  if (sum < 0.0)
    for (auto& x : phi) x = -x;
  const double M0 = *std::max_element(phi.begin(), phi.end());
  sol.noise_floor = 1e-12;
  for (auto& x : phi) {
    if (x <= 0.0) {
      if (-x > 1e-8 * M0) {
        std::ostringstream os;
        os << "ground_state: computed ground vector changes sign (value " << x
           << " relative to max " << M0 << ")";
        throw Error(ErrorCode::SignChange, os.str());
      }
      x = std::max(-x, 1e-300);
      ++sol.sign_fixed_nodes;
    }
  }
  double nrm = 0.0;
  for (double x : phi) nrm += x * x * hd;
  nrm = std::sqrt(nrm);
  for (auto& x : phi) x /= nrm;
  sol.phi0 = phi;
  sol.boundary_ratio = boundary_ratio_of(g, sol.phi0, sol.max_phi0());

  if (op.potential().kind() == PotentialKind::Decaying && !(sol.lambda0 < -opts.gap_tol)) {
    std::ostringstream os;
    os << "ground_state: no bound state below the essential spectrum (lambda0 = " << sol.lambda0
       << ")";
    throw Error(ErrorCode::NoBoundState, os.str());
  }
  if (!(sol.lambda0 < sol.lambda1))
    throw Error(ErrorCode::EigenNonConvergence, "ground_state: no strict spectral gap");
  return sol;
}

SpectralSolution solve(const LevyModel& model, const Potential& V, Grid grid,
                       const SolveOptions& opts) {
  if (V.kind() == PotentialKind::Confining || V.is_radial()) {
    // Decaying potentials with constant V outside a ball are still fine here.
  }
  while (true) {
    Operator op(model, V, grid);
    SpectralSolution sol = ground_state(op, opts);
    bool expand = opts.auto_expand && V.kind() == PotentialKind::Confining &&
                  sol.boundary_ratio > opts.boundary_target && 2 * grid.n <= opts.max_n;
    if (!expand) return sol;
    grid.half_width *= 2.0;
    grid.n *= 2;
  }
}

DenseSpectrum dense_spectrum(const Operator& op) {
  Eigen::MatrixXd H = op.dense_matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::EigenNonConvergence, "dense eigensolver failed");
  DenseSpectrum out{es.eigenvalues(), es.eigenvectors() / std::sqrt(op.grid().cell_volume())};
  return out;
}

double well_eigenvalue(double a, double v) {
  if (!(a > 0.0) || !(v > 0.0))
    throw Error(ErrorCode::InvalidArgument, "well_eigenvalue: a and v must be positive");
  // F(E) = tan(a sqrt(2(v-E))) - sqrt(E/(v-E)), E = |lambda0|; decreasing on the bracket
  // where a sqrt(2(v-E)) < pi/2.
  auto F = [&](double E) {
    return std::tan(a * std::sqrt(2.0 * (v - E))) - std::sqrt(E / (v - E));
  };
  double lo = std::max(0.0, v - kPi * kPi / (8.0 * a * a));
  double hi = v;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (F(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return -0.5 * (lo + hi);
}

KernelMatrix fk_kernel(const SpectralSolution& sol, double t, int m_modes, double window_fraction,
                       double truncation_tol) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "fk_kernel: t must be positive");
  if (m_modes < 1 || m_modes > static_cast<int>(sol.modes.size()))
    throw Error(ErrorCode::InvalidArgument, "fk_kernel: m_modes exceeds the available eigenpairs");
  KernelMatrix K;
  K.t = t;
  const double hd = sol.grid.cell_volume();
  const std::vector<double> phi0 = normalized_mode(sol.phi0, hd);
  const double M = *std::max_element(phi0.begin(), phi0.end());
  for (std::size_t i = 0; i < phi0.size(); ++i)
    if (phi0[i] >= window_fraction * M) K.nodes.push_back(i);
  const int w = static_cast<int>(K.nodes.size());
  Eigen::MatrixXd Phi(w, m_modes);
  Eigen::VectorXd e(m_modes);
  std::vector<double> last;
  for (int k = 0; k < m_modes; ++k) {
    const std::vector<double> mode = k == 0 ? phi0 : normalized_mode(sol.modes[k], hd);
    for (int i = 0; i < w; ++i) Phi(i, k) = mode[K.nodes[i]];
    e(k) = std::exp(-sol.eigenvalues[k] * t);
    if (k == m_modes - 1) last = mode;
  }
  Eigen::MatrixXd U = Phi * e.asDiagonal() * Phi.transpose();
  K.u = 0.5 * (U + U.transpose());
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j)
      if (K.u(i, j) < 0.0) {
        K.u(i, j) = 0.0;
        ++K.clamped;
      }
  double lmax = 0.0;
  for (int i = 0; i < w; ++i) lmax = std::max(lmax, std::abs(last[K.nodes[i]]));
  K.truncation_estimate =
      m_modes == 1 ? 0.0
                   : std::exp(-(sol.eigenvalues[m_modes - 1] - sol.lambda0) * t) * lmax * lmax / (M * M);
  if (K.truncation_estimate > truncation_tol) {
    std::ostringstream os;
    os << "fk_kernel: truncation estimate " << K.truncation_estimate << " exceeds " << truncation_tol
       << " (raise m_modes or t)";
    throw Error(ErrorCode::Truncation, os.str());
  }
  return K;
}

}  // namespace gstlab
