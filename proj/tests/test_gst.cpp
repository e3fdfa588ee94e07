#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "gstlab/errors.hpp"
#include "gstlab/gst.hpp"

using namespace gstlab;
using gstlab::testing::ou_solution;
using gstlab::testing::stable_solution;

namespace {
// OU gamma = 1, sigma2 = 1: X_t | X_0 = x ~ N(x e^{-t}, (1 - e^{-2t}) / 2).
double mehler_intrinsic(double t, double x, double y) {
  const double m = x * std::exp(-t), v = 0.5 * (1.0 - std::exp(-2.0 * t));
  const double p = std::exp(-(y - m) * (y - m) / (2.0 * v)) / std::sqrt(2.0 * M_PI * v);
  const double pi0 = std::exp(-y * y) / std::sqrt(M_PI);
  return p / pi0;
}
}  // namespace

TEST(IntrinsicKernel, MarkovNormalisedAndSymmetric) {
  const auto K = intrinsic_kernel(ou_solution(), 1.0, 40);
  EXPECT_LT(K.normalization_defect, 1e-6);
  EXPECT_LT((K.u - K.u.transpose()).cwiseAbs().maxCoeff(), 1e-12 * K.u.cwiseAbs().maxCoeff());
  // Far-corner entries cancel to rounding level; a few may clamp at zero.
  EXPECT_LT(K.clamped, static_cast<int>(K.nodes.size()));
}

TEST(IntrinsicKernel, MatchesMehlerOracle) {
  const auto& sol = ou_solution();
  const auto K = intrinsic_kernel(sol, 1.0, 40);
  double worst = 0.0;
  for (std::size_t i = 0; i < K.nodes.size(); ++i) {
    const double x = sol.grid.node(static_cast<int>(K.nodes[i]));
    if (std::abs(x) > 2.5) continue;
    for (std::size_t j = 0; j < K.nodes.size(); ++j) {
      const double y = sol.grid.node(static_cast<int>(K.nodes[j]));
      if (std::abs(y) > 2.5) continue;
      worst = std::max(worst, std::abs(K.u(i, j) - mehler_intrinsic(1.0, x, y)));
    }
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(IntrinsicKernel, ApproachesOneForLongTimes) {
  const auto& sol = ou_solution();
  const double t = 12.0;
  const auto K = intrinsic_kernel(sol, t, 40);
  double worst = 0.0;
  for (std::size_t i = 0; i < K.nodes.size(); ++i) {
    if (std::abs(sol.grid.node(static_cast<int>(K.nodes[i]))) > 2.0) continue;
    for (std::size_t j = 0; j < K.nodes.size(); ++j) {
      if (std::abs(sol.grid.node(static_cast<int>(K.nodes[j]))) > 2.0) continue;
      worst = std::max(worst, std::abs(K.u(i, j) - 1.0));
    }
  }
  // Leading correction is 2 x y e^{-gap t}, at most 8 e^{-12} on this box.
  EXPECT_LT(worst, 8.0 * std::exp(-(sol.gap()) * t) * 1.01);
}

TEST(IntrinsicKernel, ChapmanKolmogorov) {
  EXPECT_LT(chapman_kolmogorov_defect(ou_solution(), 1.0, 40), 1e-5);
}

TEST(IntrinsicKernel, TooFewModesRejected) {
  EXPECT_THROW(intrinsic_kernel(ou_solution(), 1.0, 1000), Error);
}

TEST(Stationary, OuGaussianDensity) {
  const auto& sol = ou_solution();
  const auto s = stationary_density(sol);
  double mass = 0.0, asym = 0.0;
  const int n = sol.grid.n;
  for (int j = 0; j < n; ++j) {
    const double x = sol.grid.node(j);
    EXPECT_NEAR(s.density[j], std::exp(-x * x) / std::sqrt(M_PI), 1e-6);
    mass += s.mass[j];
    asym = std::max(asym, std::abs(s.density[j] - s.density[n - 1 - j]));
  }
  EXPECT_NEAR(mass, 1.0, 1e-13);
  EXPECT_LE(asym, 1e-10);
}

TEST(Fields, OuDriftIsLinear) {
  const GstFields f(ou_solution(), LevyModel::brownian(1, 1.0));
  for (double x : {-3.1, -1.0, -0.2, 0.05, 0.9, 2.7}) EXPECT_NEAR(f.drift(x), -x, 1e-6) << x;
  EXPECT_NEAR(f.effective_sigma2(), 1.0, 1e-15);
}

TEST(Fields, FiniteWellDriftOutsideWell) {
  const auto& sol = gstlab::testing::well_solution();
  const GstFields f(sol, LevyModel::brownian(1, 1.0));
  const double speed = std::sqrt(2.0 * std::abs(sol.lambda0));
  for (double x : {1.3, 2.0, 4.0, 7.5}) {
    EXPECT_NEAR(f.drift(x), -speed, 1e-4) << x;
    EXPECT_NEAR(f.drift(-x), speed, 1e-4) << x;
  }
}

TEST(Fields, OutsideCertifiedWindowThrows) {
  const GstFields f(ou_solution(), LevyModel::brownian(1, 1.0));
  try {
    f.drift(11.9);
    FAIL() << "expected OutsideWindow";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutsideWindow);
  }
}

TEST(Fields, BiasIdentities) {
  const GstFields f(stable_solution(), LevyModel::stable(1, 1.0));
  for (double x : {-20.0, -3.3, 0.0, 0.7, 15.0}) {
    EXPECT_DOUBLE_EQ(f.bias(x, 0.0), 1.0);
    for (double z : {-4.0, -0.01, 0.3, 2.2}) {
      EXPECT_NEAR(f.bias(x, z) * f.bias(x + z, -z), 1.0, 1e-12) << x << " " << z;
    }
  }
}

TEST(Fields, StableDriftIsOddAndRestoring) {
  const GstFields f(stable_solution(), LevyModel::stable(1, 1.0));
  for (double x : {0.5, 2.0, 10.0}) {
    EXPECT_LT(f.drift(x), 0.0);
    EXPECT_NEAR(f.drift(x), -f.drift(-x), 1e-8 * (1.0 + std::abs(f.drift(x))));
  }
}

TEST(Interpolant, MatchesNodes) {
  const auto& sol = ou_solution();
  const Phi0Interpolant p(sol);
  for (int j : {100, 511, 512, 900}) EXPECT_NEAR(p.log_value(sol.grid.node(j)), std::log(sol.phi0[j]), 1e-12);
  // Log-linear between nodes: exact for the Gaussian up to h^2/8 curvature.
  EXPECT_NEAR(p.log_value(0.3), std::log(gstlab::testing::ou_phi0(0.3)), p.interpolation_error_bound() + 1e-10);
  EXPECT_NEAR(p.dlog(1.0), -1.0, 1e-3);
}

TEST(Sandwich, StablePowerLawSlope) {
  const auto rep = sandwich_check(stable_solution(), LevyModel::stable(1, 1.0), Potential::polynomial(1));
  EXPECT_NEAR(rep.slope, -4.0, 0.3);
  EXPECT_LT(rep.spread_up(), 10.0);
  EXPECT_LT(rep.spread_low(), 10.0);
}

TEST(Sandwich, DiffusionRejected) {
  try {
    sandwich_check(ou_solution(), LevyModel::brownian(1, 1.0), Potential::ornstein_uhlenbeck(1.0));
    FAIL() << "expected Precondition";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Precondition);
  }
}

TEST(Sandwich, ExponentialDensityDeepWell) {
  const DensityProfile f{1, 1.0, 1.0, 1.0, 2.0};
  const auto model = LevyModel::from_density(f);
  const auto V = Potential::well(20.0, 1.0);
  SolveOptions o;
  o.auto_expand = false;
  const auto sol = solve(model, V, Grid{1, 30.0, 1024}, o);
  ASSERT_LT(sol.lambda0, -1.0);
  const auto rep = sandwich_check(sol, model, V);
  EXPECT_EQ(rep.regime, "decaying");
  EXPECT_LT(rep.spread_low(), 10.0);
  EXPECT_GT(rep.min_low, 0.0);
}

TEST(Compare, PolynomialDominatesGaussian) {
  const auto fwd = compare_ground_states(stable_solution(), ou_solution(), 1.0);
  const auto rev = compare_ground_states(ou_solution(), stable_solution(), 1.0);
  EXPECT_TRUE(fwd.condition_holds);
  EXPECT_FALSE(rev.condition_holds);
  ASSERT_EQ(fwd.scales.size(), 3u);
  EXPECT_DOUBLE_EQ(fwd.scales[2], 4.0);
}

TEST(Compare, IdentityRatioIsOne) {
  const auto rep = compare_ground_states(ou_solution(), ou_solution(), 1.0);
  EXPECT_NEAR(rep.min_ratio[0], 1.0, 1e-12);
  EXPECT_NEAR(rep.tail_slope[0], 0.0, 1e-12);
  // The condition asks for every c >= c0; phi0(2x)/phi0(x) -> 0 for a Gaussian.
  EXPECT_FALSE(rep.condition_holds);
}
