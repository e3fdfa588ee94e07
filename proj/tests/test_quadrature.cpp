#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "gstlab/errors.hpp"
#include "gstlab/quadrature.hpp"

using namespace gstlab;

TEST(Quadrature, SemiInfiniteExponential) {
  const auto r = quad::integrate([](double x) { return std::exp(-x); }, 0.0, INFINITY);
  EXPECT_NEAR(r.value, 1.0, 1e-9);
}

TEST(Quadrature, BreakpointsHandleJumps) {
  // Step at 0.3: value is 0.3 * 1 + 0.7 * 5.
  auto f = [](double x) { return x < 0.3 ? 1.0 : 5.0; };
  const std::vector<double> br{0.3};
  const auto r = quad::integrate(f, 0.0, 1.0, {1e-12, 1e-12}, br);
  EXPECT_NEAR(r.value, 3.8, 1e-12);
}

TEST(Quadrature, DivergentIntegrandThrowsWithAchievedTolerance) {
  try {
    quad::integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, {1e-10, 1e-10});
    FAIL() << "expected QuadratureError";
  } catch (const QuadratureError& e) {
    EXPECT_EQ(e.code(), ErrorCode::QuadratureFailure);
    EXPECT_GT(e.achieved_tolerance(), 0.0);
  }
}

TEST(Quadrature, UncheckedNeverThrows) {
  EXPECT_NO_THROW(quad::integrate_unchecked([](double x) { return 1.0 / x; }, 0.0, 1.0, {1e-10, 1e-10}));
}

TEST(Quadrature, FourierTailsOfExponential) {
  // int_0^inf e^{-r} cos(w r) dr = 1/(1+w^2), sine part w/(1+w^2).
  for (double w : {0.5, 3.0, 40.0}) {
    const auto c = quad::cos_tail([](double r) { return std::exp(-r); }, 0.0, w);
    const auto s = quad::sin_tail([](double r) { return std::exp(-r); }, 0.0, w);
    EXPECT_NEAR(c.value, 1.0 / (1.0 + w * w), 1e-8) << "w=" << w;
    EXPECT_NEAR(s.value, w / (1.0 + w * w), 1e-8) << "w=" << w;
  }
}

TEST(Quadrature, FourierTailOfPowerLaw) {
  // Integration by parts: int_1^inf cos(r)/r^2 dr = cos 1 - (pi/2 - Si(1)).
  const double si1 = 0.946083070367183;
  const double exact = std::cos(1.0) - (M_PI / 2 - si1);
  const auto c = quad::cos_tail([](double r) { return 1.0 / (r * r); }, 1.0, 1.0);
  EXPECT_NEAR(c.value, exact, 1e-7);
}

TEST(Quadrature, LogIntegrateExpHandlesHugeExponents) {
  // log int_0^10 e^{5000 - y} dy = 5000 + log(1 - e^{-10}).
  const long double v = quad::log_integrate_exp([](long double y) { return 5000.0L - y; }, 0.0L, 10.0L);
  EXPECT_NEAR(static_cast<double>(v - 5000.0L), std::log1p(-std::exp(-10.0)), 1e-8);
}

TEST(Quadrature, LogAddExp) {
  EXPECT_NEAR(static_cast<double>(quad::log_add_exp(1000.0L, 1000.0L)), 1000.0 + std::log(2.0), 1e-12);
  EXPECT_EQ(quad::log_add_exp(-INFINITY, 3.0L), 3.0L);
}
