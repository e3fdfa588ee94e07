#include "gstlab/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "gstlab/errors.hpp"

namespace gstlab {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

PcgResult pcg(const LinearMap& A, const LinearMap& M_inv, std::span<const double> b,
              std::span<double> x, double rel_tol, int max_iter) {
  const std::size_t n = b.size();
  std::vector<double> r(n), z(n), p(n), Ap(n);
  A(x, Ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
  const double nb = std::max(norm(b), 1e-300);
  PcgResult res;
  double nr = norm(r);
  if (nr <= rel_tol * nb) return {0, nr / nb, true};
  M_inv(r, z);
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    A(p, Ap);
    double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) break;
    double a = rz / pAp;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += a * p[i];
      r[i] -= a * Ap[i];
    }
    nr = norm(r);
    res.iterations = it;
    res.rel_residual = nr / nb;
    if (res.rel_residual <= rel_tol) {
      res.converged = true;
      return res;
    }
    M_inv(r, z);
    double rz_new = dot(r, z);
    double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return res;
}

EigenResult smallest_eigenpairs(const LinearMap& H, const LinearMap& inverse, std::size_t n,
                                EigenOptions opts) {
  const int k = opts.n_eigen;
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw Error(ErrorCode::InvalidArgument, "eigensolver: invalid number of eigenpairs");
  int max_basis = opts.max_basis > 0 ? opts.max_basis : std::max(3 * k + 20, 40);
  max_basis = static_cast<int>(std::min<std::size_t>(max_basis, n));
  const int keep = std::min(max_basis - 1, k + std::max(4, k / 2));
  const int check_every = std::max(1, k / 4);

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  std::vector<std::vector<double>> Q, HQ;
  Eigen::MatrixXd G(0, 0);

  // Classical Gram-Schmidt applied twice; returns the norm after projection.
  auto orthogonalize = [&](std::vector<double>& w) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : Q) {
        double c = dot(q, w);
        for (std::size_t i = 0; i < n; ++i) w[i] -= c * q[i];
      }
    }
    return norm(w);
  };
  auto random_vector = [&]() {
    std::vector<double> v(n);
    for (auto& x : v) x = unif(rng);
    return v;
  };
  auto append = [&](std::vector<double> w) {
    double before = norm(w);
    double after = orthogonalize(w);
    int guard = 0;
    while (!(after > 1e-8 * before) && guard++ < 5) {
      w = random_vector();
      before = norm(w);
      after = orthogonalize(w);
    }
    for (auto& x : w) x /= after;
    std::vector<double> hw(n);
    H(w, hw);
    const int m = static_cast<int>(Q.size());
    Eigen::MatrixXd G2(m + 1, m + 1);
    if (m > 0) G2.topLeftCorner(m, m) = G;
    for (int i = 0; i < m; ++i) {
      double g = dot(Q[i], hw);
      G2(i, m) = g;
      G2(m, i) = g;
    }
    G2(m, m) = dot(w, hw);
    G = std::move(G2);
    Q.push_back(std::move(w));
    HQ.push_back(std::move(hw));
  };

  EigenResult out;
  std::vector<double> direction = random_vector();
  append(direction);
  direction = Q.back();

  int restarts = 0;
  std::vector<double> w(n);
  while (true) {
    std::fill(w.begin(), w.end(), 0.0);
    inverse(direction, w);
    append(w);
    ++out.expansions;
    direction = Q.back();
    const int m = static_cast<int>(Q.size());
    if (m < k + 1) continue;
    // Ritz extraction costs O(n m k); with many pairs only check periodically.
    if (m < max_basis && (m - k - 1) % check_every != 0) continue;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (G + G.transpose()));
    const Eigen::VectorXd& theta = es.eigenvalues();
    const Eigen::MatrixXd& S = es.eigenvectors();

    auto ritz = [&](int j, std::vector<double>& y, std::vector<double>& hy) {
      y.assign(n, 0.0);
      hy.assign(n, 0.0);
      for (int i = 0; i < m; ++i) {
        double s = S(i, j);
        for (std::size_t t = 0; t < n; ++t) {
          y[t] += s * Q[i][t];
          hy[t] += s * HQ[i][t];
        }
      }
    };

    bool all = true;
    int first_bad = -1;
    std::vector<std::vector<double>> Y(k), R(k);
    std::vector<double> resid(k);
    for (int j = 0; j < k; ++j) {
      std::vector<double> hy;
      ritz(j, Y[j], hy);
      R[j].resize(n);
      for (std::size_t t = 0; t < n; ++t) R[j][t] = hy[t] - theta(j) * Y[j][t];
      resid[j] = norm(R[j]);
      bool ok = resid[j] <= opts.tol * std::max(1.0, std::abs(theta(j)));
      if (!ok && first_bad < 0) first_bad = j;
      all = all && ok;
    }
    if (all) {
      out.converged = true;
      for (int j = 0; j < k; ++j) {
        out.values.push_back(theta(j));
        out.vectors.push_back(std::move(Y[j]));
        out.residuals.push_back(resid[j]);
      }
      return out;
    }
    if (m >= max_basis) {
      if (++restarts > opts.max_restarts) {
        std::ostringstream os;
        os << "eigensolver did not converge: residual " << resid[first_bad] << " for pair "
           << first_bad << " after " << out.expansions << " expansions";
        throw Error(ErrorCode::EigenNonConvergence, os.str());
      }
      // Thick restart on the lowest Ritz vectors.
      std::vector<std::vector<double>> newQ, newHQ;
      for (int j = 0; j < keep; ++j) {
        std::vector<double> y, hy;
        ritz(j, y, hy);
        newQ.push_back(std::move(y));
        newHQ.push_back(std::move(hy));
      }
      Q = std::move(newQ);
      HQ = std::move(newHQ);
      G = Eigen::MatrixXd::Zero(keep, keep);
      for (int i = 0; i < keep; ++i)
        for (int j = 0; j < keep; ++j) G(i, j) = dot(Q[i], HQ[j]);
      direction = R[first_bad];
      double nd = norm(direction);
      for (auto& x : direction) x /= nd;
    } else {
      // Steer the next expansion toward the first unconverged pair.
      direction = R[first_bad];
      double nd = norm(direction);
      for (auto& x : direction) x /= nd;
    }
  }
}

}  // namespace gstlab
