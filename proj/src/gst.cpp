#include "gstlab/gst.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "gstlab/errors.hpp"
#include "gstlab/quadrature.hpp"

namespace gstlab {

namespace {

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct ModeTable {
  std::vector<std::vector<double>> modes;  // normalised
  Eigen::MatrixXd gram;                    // <phi_k, phi_l> h^d over the grid
};

ModeTable mode_table(const SpectralSolution& sol, int m) {
  if (m < 1 || m > static_cast<int>(sol.modes.size()))
    throw Error(ErrorCode::InvalidArgument, "m_modes exceeds the available eigenpairs");
  const double hd = sol.grid.cell_volume();
  ModeTable t;
  t.modes.push_back(normalized_mode(sol.phi0, hd));
  for (int k = 1; k < m; ++k) t.modes.push_back(normalized_mode(sol.modes[k], hd));
  t.gram.resize(m, m);
  for (int k = 0; k < m; ++k)
    for (int l = 0; l <= k; ++l) {
      double s = 0.0;
      for (std::size_t i = 0; i < t.modes[k].size(); ++i) s += t.modes[k][i] * t.modes[l][i];
      t.gram(k, l) = t.gram(l, k) = s * hd;
    }
  return t;
}

}  // namespace

IntrinsicKernel intrinsic_kernel(const SpectralSolution& sol, double t, int m_modes,
                                 double window_fraction, double max_defect) {
  KernelMatrix K = fk_kernel(sol, t, m_modes, window_fraction);
  const double hd = sol.grid.cell_volume();
  const ModeTable mt = mode_table(sol, m_modes);
  const std::vector<double>& phi = mt.modes[0];
  IntrinsicKernel out;
  out.t = t;
  out.nodes = K.nodes;
  out.clamped = K.clamped;
  out.truncation_estimate = K.truncation_estimate;
  const int w = static_cast<int>(K.nodes.size());
  std::vector<double> p(w);
  out.weights.resize(w);
  for (int i = 0; i < w; ++i) {
    p[i] = phi[K.nodes[i]];
    out.weights[i] = p[i] * p[i] * hd;
  }
  const double growth = std::exp(sol.lambda0 * t);
  out.u.resize(w, w);
  for (int j = 0; j < w; ++j)
    for (int i = 0; i < w; ++i) out.u(i, j) = growth * K.u(i, j) / (p[i] * p[j]);
  // Full-grid row mass: e^{lambda0 t} / phi0(x) sum_k e^{-lambda_k t} phi_k(x) <phi_k, phi0>.
  for (int i = 0; i < w; ++i) {
    double s = 0.0;
    for (int k = 0; k < m_modes; ++k)
      s += std::exp(-(sol.eigenvalues[k] - sol.lambda0) * t) * mt.modes[k][K.nodes[i]] * mt.gram(k, 0);
    s /= p[i];
    out.normalization_defect = std::max(out.normalization_defect, std::abs(s - 1.0));
    double inside = 0.0;
    for (int j = 0; j < w; ++j) inside += out.u(i, j) * out.weights[j];
    out.window_leak = std::max(out.window_leak, s - inside);
  }
  if (out.normalization_defect > max_defect) {
    std::ostringstream os;
    os << "intrinsic kernel: normalization defect " << out.normalization_defect << " exceeds "
       << max_defect << " (refine the grid or raise the mode count)";
    throw Error(ErrorCode::Normalization, os.str());
  }
  return out;
}

double chapman_kolmogorov_defect(const SpectralSolution& sol, double t, int m_modes,
                                 double window_fraction) {
  const IntrinsicKernel k2 = intrinsic_kernel(sol, 2.0 * t, m_modes, window_fraction, 1.0);
  const ModeTable mt = mode_table(sol, m_modes);
  const int w = static_cast<int>(k2.nodes.size());
  // Composition over the whole grid: Phi_W E G E Phi_W^T with E = diag(e^{-lambda_k t}).
  Eigen::MatrixXd Phi(w, m_modes);
  Eigen::VectorXd e(m_modes);
  for (int k = 0; k < m_modes; ++k) {
    e(k) = std::exp(-(sol.eigenvalues[k] - sol.lambda0) * t);
    for (int i = 0; i < w; ++i) Phi(i, k) = mt.modes[k][k2.nodes[i]];
  }
  const Eigen::MatrixXd C = Phi * e.asDiagonal() * mt.gram * e.asDiagonal() * Phi.transpose();
  double worst = 0.0;
  for (int j = 0; j < w; ++j)
    for (int i = 0; i < w; ++i) {
      const double comp = C(i, j) / (mt.modes[0][k2.nodes[i]] * mt.modes[0][k2.nodes[j]]);
      worst = std::max(worst, std::abs(comp - k2.u(i, j)) / std::max(1.0, std::abs(k2.u(i, j))));
    }
  return worst;
}

StationaryDensity stationary_density(const SpectralSolution& sol) {
  const double hd = sol.grid.cell_volume();
  const std::vector<double> phi = normalized_mode(sol.phi0, hd);
  StationaryDensity out;
  out.grid = sol.grid;
  out.density.resize(phi.size());
  out.mass.resize(phi.size());
  double total = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) total += phi[i] * phi[i] * hd;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    out.density[i] = phi[i] * phi[i] / total;
    out.mass[i] = out.density[i] * hd;
  }
  return out;
}

Phi0Interpolant::Phi0Interpolant(const SpectralSolution& sol) : grid_(sol.grid) {
  if (grid_.d != 1) throw Error(ErrorCode::InvalidArgument, "phi0 interpolation is d = 1 only");
  const std::vector<double> phi = normalized_mode(sol.phi0, grid_.cell_volume());
  const int n = grid_.n;
  const double h = grid_.spacing();
  logphi_.resize(n);
  for (int j = 0; j < n; ++j) logphi_[j] = std::log(phi[j]);
  dlog_.resize(n);
  for (int j = 1; j + 1 < n; ++j) dlog_[j] = (logphi_[j + 1] - logphi_[j - 1]) / (2.0 * h);
  dlog_[0] = (logphi_[1] - logphi_[0]) / h;
  dlog_[n - 1] = (logphi_[n - 1] - logphi_[n - 2]) / h;
  r_cert_ = sol.certified_radius();
  for (int j = 1; j + 1 < n; ++j)
    if (std::abs(grid_.node(j)) <= r_cert_)
      err_bound_ = std::max(err_bound_, std::abs(logphi_[j + 1] - 2 * logphi_[j] + logphi_[j - 1]) / 8.0);
}

double Phi0Interpolant::log_value(double x) const {
  const int n = grid_.n;
  const double h = grid_.spacing();
  const double u = (x + grid_.half_width) / h - 0.5;
  if (u <= 0.0) {
    const double s = std::max(0.0, (logphi_[1] - logphi_[0]) / h);
    return logphi_[0] + s * u * h;
  }
  if (u >= n - 1) {
    const double s = std::min(0.0, (logphi_[n - 1] - logphi_[n - 2]) / h);
    return logphi_[n - 1] + s * (u - (n - 1)) * h;
  }
  const int j = static_cast<int>(u);
  const double f = u - j;
  return (1.0 - f) * logphi_[j] + f * logphi_[j + 1];
}

double Phi0Interpolant::value(double x) const { return std::exp(log_value(x)); }

double Phi0Interpolant::log_increment(double x, double z) const {
  const int n = grid_.n;
  const double h = grid_.spacing();
  const double u = (x + grid_.half_width) / h - 0.5;
  const double uz = u + z / h;
  // Outside the interior, or for long steps, the plain difference is accurate.
  if (!(std::abs(z) <= 4.0 * h) || u <= 0.0 || u >= n - 1 || uz <= 0.0 || uz >= n - 1)
    return log_value(x + z) - log_value(x);
  auto slope = [&](int j) { return (logphi_[j + 1] - logphi_[j]) / h; };
  // Slope of the first cell times z, plus the slope jump at each node crossed,
  // so no O(1) logs are subtracted when z is tiny.
  if (z >= 0.0) {
    const int j = static_cast<int>(std::floor(u));
    double acc = slope(j) * z;
    for (int k = j + 1; k <= n - 2; ++k) {
      const double dk = grid_.node(k) - x;
      if (!(dk < z)) break;
      acc += (slope(k) - slope(k - 1)) * (z - dk);
    }
    return acc;
  }
  const int j = static_cast<int>(std::ceil(u)) - 1;
  double acc = slope(j) * z;
  for (int k = j; k >= 1; --k) {
    const double dk = grid_.node(k) - x;
    if (!(dk > z)) break;
    acc += (slope(k - 1) - slope(k)) * (z - dk);
  }
  return acc;
}

double Phi0Interpolant::dlog(double x) const {
  const int n = grid_.n;
  const double u = (x + grid_.half_width) / grid_.spacing() - 0.5;
  if (u <= 0.0) return dlog_[0];
  if (u >= n - 1) return dlog_[n - 1];
  const int j = static_cast<int>(u);
  const double f = u - j;
  return (1.0 - f) * dlog_[j] + f * dlog_[j + 1];
}

GstFields::GstFields(const SpectralSolution& sol, const LevyModel& model)
    : phi_(sol), model_(model) {
  if (model.dim() != 1) throw Error(ErrorCode::InvalidArgument, "GST fields are d = 1 only");
  eps_ = sol.grid.spacing();
  sigma2_eff_ = model.diffusion_coeff();
  if (model.has_jumps()) sigma2_eff_ += model.small_jump_variance(eps_);
}

double GstFields::log_bias(double x, double z) const {
  return phi_.log_increment(x, z);
}

double GstFields::bias(double x, double z) const { return std::exp(log_bias(x, z)); }

double GstFields::sde_drift(double x) const { return sigma2_eff_ * phi_.dlog(x); }

double GstFields::drift(double x) const {
  if (std::abs(x) > phi_.certified_radius()) {
    std::ostringstream os;
    os << "drift: x = " << x << " lies outside the certified window (radius "
       << phi_.certified_radius() << ")";
    throw Error(ErrorCode::OutsideWindow, os.str());
  }
  double out = model_.diffusion_coeff() * phi_.dlog(x);
  if (!model_.has_jumps()) return out;
  // Breakpoints where x + z crosses a node (kinks of the interpolant).
  const Grid& g = phi_.grid();
  std::vector<double> br{0.0};
  const double h = g.spacing();
  int j0 = static_cast<int>(std::floor((x - 1.0 + g.half_width) / h - 0.5));
  int j1 = static_cast<int>(std::ceil((x + 1.0 + g.half_width) / h - 0.5));
  for (int j = std::max(0, j0); j <= std::min(g.n - 1, j1); ++j) {
    const double z = g.node(j) - x;
    if (z > -1.0 && z < 1.0 && z != 0.0) br.push_back(z);
  }
  std::sort(br.begin(), br.end());
  auto f = [&](double z) {
    return z * std::expm1(log_bias(x, z)) * model_.levy_density(std::abs(z));
  };
  out += quad::integrate(f, -1.0, 1.0, {1e-8, 1e-6}, br).value;
  return out;
}

GstFields gst_fields(const SpectralSolution& sol, const LevyModel& model) {
  return GstFields(sol, model);
}

SandwichReport sandwich_check(const SpectralSolution& sol, const LevyModel& model,
                              const Potential& V, const SandwichOptions& opts) {
  if (!model.has_jumps())
    throw Error(ErrorCode::Precondition,
                "sandwich_check: the model has no jump part (nu = 0); the bounds do not apply");
  const Grid& g = sol.grid;
  const bool decaying = V.kind() == PotentialKind::Decaying;
  if (decaying && !(sol.lambda0 < 0.0))
    throw Error(ErrorCode::Precondition, "sandwich_check: decaying case needs lambda0 < 0");
  const std::vector<double> phi = normalized_mode(sol.phi0, g.cell_volume());

  SandwichReport rep;
  rep.regime = decaying ? "decaying" : "confining";
  rep.r_min = opts.r_min;
  rep.r_max = sol.certified_radius();
  rep.epsilon = opts.epsilon;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double r = g.radius(i);
    if (r < rep.r_min || r > rep.r_max) continue;
    double x[2];
    g.position(i, x);
    const double nu1 = std::min(1.0, model.levy_density(r));
    rep.radii.push_back(r);
    rep.phi0.push_back(phi[i]);
    if (decaying) {
      rep.ratio_up.push_back(phi[i] / nu1);
      rep.ratio_low.push_back(phi[i] / nu1);
    } else {
      const UnitBallEnvelope env = unit_ball_envelope(V, std::span<const double>(x, g.d));
      rep.ratio_up.push_back(phi[i] * std::max(1.0, env.v_up) / nu1);
      rep.ratio_low.push_back(phi[i] * std::max(1.0, env.v_low) / nu1);
    }
  }
  if (rep.radii.size() < 8) {
    std::ostringstream os;
    os << "sandwich_check: window [" << rep.r_min << ", " << rep.r_max
       << "] holds too few nodes; enlarge the grid";
    throw Error(ErrorCode::WindowTooSmall, os.str());
  }
  auto mm = [](const std::vector<double>& v, double& lo, double& hi) {
    lo = *std::min_element(v.begin(), v.end());
    hi = *std::max_element(v.begin(), v.end());
  };
  mm(rep.ratio_up, rep.min_up, rep.max_up);
  mm(rep.ratio_low, rep.min_low, rep.max_low);

  std::vector<double> lr, r, lp;
  const double from = std::max(rep.r_min, opts.slope_from * rep.r_max);
  for (std::size_t k = 0; k < rep.radii.size(); ++k)
    if (rep.radii[k] >= from) {
      lr.push_back(std::log(rep.radii[k]));
      r.push_back(rep.radii[k]);
      lp.push_back(std::log(rep.phi0[k]));
    }
  if (lr.size() < 4)
    throw Error(ErrorCode::WindowTooSmall, "sandwich_check: slope window holds too few nodes");
  rep.slope = fit_slope(lr, lp);
  rep.exp_rate = -fit_slope(r, lp);
  if (decaying) rep.theta_fit = rep.exp_rate / std::sqrt(std::abs(sol.lambda0) + opts.epsilon);
  return rep;
}

ComparisonReport compare_ground_states(const SpectralSolution& sol1, const SpectralSolution& sol2,
                                       double c0, double r_lo) {
  if (sol1.grid.d != sol2.grid.d)
    throw Error(ErrorCode::InvalidArgument, "compare_ground_states: dimensions differ");
  if (!(c0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "compare_ground_states: c0 must be positive");
  const Phi0Interpolant p1(sol1), p2(sol2);
  ComparisonReport rep;
  rep.r_lo = r_lo;
  rep.r_hi = std::min(p2.certified_radius(), p1.certified_radius() / (4.0 * c0));
  if (!(rep.r_hi > 1.25 * r_lo)) {
    std::ostringstream os;
    os << "compare_ground_states: windows incompatible (common range [" << r_lo << ", " << rep.r_hi
       << "] at c = " << 4.0 * c0 << ")";
    throw Error(ErrorCode::WindowTooSmall, os.str());
  }
  rep.condition_holds = true;
  constexpr int kPoints = 200;
  for (double c : {c0, 2.0 * c0, 4.0 * c0}) {
    double worst = std::numeric_limits<double>::infinity();
    std::vector<double> lx, lq;
    for (int k = 0; k <= kPoints; ++k) {
      const double x = r_lo + (rep.r_hi - r_lo) * k / kPoints;
      for (double s : {-1.0, 1.0}) {
        const double lratio = p1.log_value(s * c * x) - p2.log_value(s * x);
        worst = std::min(worst, std::exp(lratio));
        if (k >= kPoints / 2) {
          lx.push_back(std::log(x));
          lq.push_back(lratio);
        }
      }
    }
    const double slope = fit_slope(lx, lq);
    rep.scales.push_back(c);
    rep.min_ratio.push_back(worst);
    rep.tail_slope.push_back(slope);
    if (!(worst > 0.0) || slope < -0.5) rep.condition_holds = false;
  }
  return rep;
}

}  // namespace gstlab
