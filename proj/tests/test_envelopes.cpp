#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "gstlab/errors.hpp"
#include "gstlab/envelopes.hpp"
#include "gstlab/simulate.hpp"

using namespace gstlab;

namespace {
long double ld(double x) { return static_cast<long double>(x); }
}  // namespace

TEST(Profile, IteratedLogPowerValue) {
  const auto tau = ProfileFunction::iterated_log_power(4.0, 1, {0.0}, 1.5);
  // log tau at r = e^10: (10 + 1.5 log 10) / 7.
  EXPECT_NEAR(static_cast<double>(tau.log_value(10.0L)), (10.0 + 1.5 * std::log(10.0)) / 7.0, 1e-12);
  const auto tau2 = ProfileFunction::iterated_log_power(2.0, 1, {0.5, 0.0}, 2.0);
  // (r (log r)^2 (log log r)^2)^{1/3} at log r = 100.
  const double want = (100.0 + 2.0 * std::log(100.0) + 2.0 * std::log(std::log(100.0))) / 3.0;
  EXPECT_NEAR(static_cast<double>(tau2.log_value(100.0L)), want, 1e-12);
}

TEST(Profile, IteratedLogPowerRejectsBadParameters) {
  EXPECT_THROW(ProfileFunction::iterated_log_power(0.4, 1, {0.0}, 1.5), Error);
  EXPECT_THROW(ProfileFunction::iterated_log_power(4.0, 1, {}, 1.5), Error);
}

TEST(Profile, LogPowerValue) {
  const auto tau = ProfileFunction::log_power(2.0, 3.0);
  EXPECT_NEAR(tau(std::exp(16.0)), 12.0, 1e-10);
  EXPECT_EQ(tau.family(), ProfileFamily::LogPower);
}

TEST(Profile, FromJsonNamesMissingParameters) {
  nlohmann::ordered_json j = {{"family", "iterated_log_power"}, {"gamma_prime", 4}, {"d", 1}};
  try {
    profile_from_json(j);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field_path(), "profile.theta");
    EXPECT_NE(std::string(e.what()).find("delta"), std::string::npos);
  }
  j["theta"] = {0.0};
  j["delta"] = 1.5;
  const auto tau = profile_from_json(j);
  EXPECT_NEAR(static_cast<double>(tau.log_value(10.0L)), (10.0 + 1.5 * std::log(10.0)) / 7.0, 1e-12);
  EXPECT_THROW(profile_from_json({{"family", "spline"}}), ConfigError);
}

TEST(RegVar, IndexHoldsForSlowlyVaryingCorrection) {
  RegVarFunction R{2.0, [](long double lr) { return std::log(lr); }};  // r^2 log r
  const auto chk = check_index(R);
  EXPECT_TRUE(chk.holds);
  EXPECT_LT(chk.dev10.back(), 1e-2);
  RegVarFunction bad{1.0, [](long double lr) { return std::sqrt(lr); }};  // e^{sqrt log r}: not slowly varying
  EXPECT_FALSE(check_index(bad, 6.0).holds);
}

TEST(RegVar, AsymptoticInverseOfPower) {
  RegVarFunction R{2.0};
  for (double lt : {1.0, 50.0, 3000.0})
    EXPECT_NEAR(static_cast<double>(asymptotic_inverse_log(R, ld(lt))), lt / 2.0, 1e-9);
}

TEST(RegVar, ConjugateOfConstantIsClosedForm) {
  const auto c = conjugate_slowly_varying([](long double) { return std::log(3.0L); }, 2.0);
  EXPECT_TRUE(c.closed_form);
  // L* = L^{-1/lambda} = 3^{-1/2}.
  EXPECT_NEAR(static_cast<double>(c.log_Lstar(5.0L)), -0.5 * std::log(3.0), 1e-12);
}

TEST(Kappa, StandardChoice) {
  EXPECT_NEAR(KappaFunction::standard({1, 1.0, 1.0, 0.5, 1.0}, 0.0, 0.0).value(4.0), 2.0, 1e-12);
  EXPECT_NEAR(KappaFunction::standard({1, 1.0, 0.0, 0.0, 3.0}, 0.0, 0.0).value(4.0), 1.0, 1e-12);
  EXPECT_NEAR(KappaFunction::standard({1, 1.0, 1.0, 0.5, 1.0}, 1.0, 2.0).value(3.0), 9.0, 1e-12);
}

TEST(TailBound, ExponentialWithLinearKappa) {
  const auto rep = tail_bound_check([](double r) { return -r; }, KappaFunction::power(1.0), 1, 1.0, 40.0);
  EXPECT_TRUE(rep.pre_decay && rep.pre_integrable && rep.pre_smooth);
  EXPECT_TRUE(rep.L_holds);
  EXPECT_TRUE(rep.U_holds);
  EXPECT_TRUE(rep.conclusion_ok());
  // Exact tail e^{-r} is bracketed: bound_up >= tail >= bound_low.
  for (const auto& row : rep.rows) {
    EXPECT_NEAR(row.tail, std::exp(-row.r), 1e-6 * std::exp(-row.r));
    EXPECT_LE(row.bound_low, row.tail * (1 + 1e-6));
    EXPECT_GE(row.bound_up, row.tail * (1 - 1e-6));
  }
}

TEST(TailBound, PowerLawWithConstantKappa) {
  const DensityProfile f{1, 1.0, 0.0, 0.0, 3.0};
  const auto rep = tail_bound_check([f](double r) { return 2.0 * f.log_value(r); }, KappaFunction::constant(), 1, 2.0, 50.0);
  EXPECT_TRUE(rep.L_holds && rep.U_holds);
  EXPECT_TRUE(rep.conclusion_ok());
  // h r^d / tail = 5 for h = r^{-6}: A + B brackets it.
  EXPECT_LE(rep.A2 + rep.B2, 5.0 + 1e-3);
  EXPECT_GE(rep.A1 + rep.B1, 5.0 - 1e-3);
}

TEST(Classifier, CanonicalIntegrals) {
  auto lg = [](auto f) { return std::function<long double(long double)>(f); };
  EXPECT_EQ(classify_integral(lg([](long double y) { return -y; }), 1.0L).verdict, Verdict::Finite);
  EXPECT_EQ(classify_integral(lg([](long double y) { return -2.0L * std::log(y); }), 1.0L).verdict, Verdict::Finite);
  EXPECT_EQ(classify_integral(lg([](long double y) { return -1.5L * std::log(y); }), 1.0L).verdict, Verdict::Finite);
  EXPECT_EQ(classify_integral(lg([](long double y) { return -std::log(y); }), 1.0L).verdict, Verdict::Divergent);
  EXPECT_EQ(classify_integral(lg([](long double) { return 0.0L; }), 1.0L).verdict, Verdict::Divergent);
  EXPECT_EQ(classify_integral(lg([](long double y) { return -0.5L * std::log(y); }), 1.0L).verdict,
            Verdict::Divergent);
  // 1/(y log^2 y): finite, but only logarithmically; must not be called divergent.
  const auto slow = classify_integral(
      lg([](long double y) { return -std::log(y) - 2.0L * std::log(std::log(y)); }), 3.0L);
  EXPECT_NE(slow.verdict, Verdict::Divergent);
}

TEST(Classifier, FiniteValueIsAccurate) {
  const auto r = classify_integral([](long double y) { return -y; }, 1.0L);
  EXPECT_NEAR(static_cast<double>(r.log_accumulated), -1.0, 1e-6);
}

TEST(Bisection, SyntheticThreshold) {
  const auto r = bisect_threshold([](double c) { return c > 0.37 ? Verdict::Finite : Verdict::Divergent; });
  EXPECT_EQ(r.kind, ConstantKind::Finite);
  EXPECT_NEAR(r.value, 0.37, 1e-6);
  EXPECT_EQ(bisect_threshold([](double) { return Verdict::Finite; }).kind, ConstantKind::Zero);
  EXPECT_EQ(bisect_threshold([](double) { return Verdict::Divergent; }).kind, ConstantKind::Infinite);
  EXPECT_EQ(bisect_threshold([](double c) { return c < 1.0 ? Verdict::Inconclusive : Verdict::Finite; }).kind,
            ConstantKind::Inconclusive);
}

TEST(IntegralTest, ConstantProfileDiverges) {
  const auto tail = StationaryTail::gaussian(1.0);
  const auto tau = ProfileFunction::custom([](long double) { return std::log(2.0L); }, 0.0L, "2");
  EXPECT_EQ(integral_test_general(tail, tau, 1.0).verdict, Verdict::Divergent);
}

TEST(IntegralTest, GaussianThresholdAtInverseRootGamma) {
  const auto tail = StationaryTail::gaussian(1.0);
  const double eps = 0.2;
  EXPECT_EQ(integral_test_general(tail, ProfileFunction::log_power(2.0, std::sqrt(1 + eps)), 1.0).verdict,
            Verdict::Finite);
  EXPECT_EQ(integral_test_general(tail, ProfileFunction::log_power(2.0, std::sqrt(1 - eps)), 1.0).verdict,
            Verdict::Divergent);
  for (double gamma : {1.0, 4.0}) {
    const auto b = escape_constant_general(StationaryTail::gaussian(gamma), ProfileFunction::log_power(2.0));
    ASSERT_EQ(b.kind, ConstantKind::Finite);
    EXPECT_NEAR(b.value * std::sqrt(gamma), 1.0, 0.05);
  }
}

TEST(IntegralTest, GridTailMatchesGaussian) {
  const auto& sol = gstlab::testing::ou_solution();
  const StationaryTail t(sol);
  // Cell masses are midpoint sums, so the tail mass is short by about
  // (h^2/24) |rho'(s)| / G(s) ~ h^2 s^2 / 6 relative; log-linear interpolation
  // between cell edges adds at most h^2/8. The bound is taken with headroom.
  const double h = sol.grid.spacing();
  for (double s : {0.5, 1.5, 3.0}) {
    const double bound = 1.5 * h * h * (s * s / 6.0 + 0.125);
    EXPECT_NEAR(static_cast<double>(t.log_tail(std::log(ld(s)))), std::log(std::erfc(s)), bound) << s;
  }
  const auto b = escape_constant_general(t, ProfileFunction::log_power(2.0));
  ASSERT_EQ(b.kind, ConstantKind::Finite);
  EXPECT_NEAR(b.value, 1.0, 0.05);
}

TEST(IntegralTest, ExponentialPotentialConstant) {
  // L2 density (mu = 1, beta = 0.5) with V = e^{r}: c* = (2 eta)^{-1/vartheta} = 1/2.
  ProfileTestSpec spec;
  spec.f = {1, 1.0, 1.0, 0.5, 1.0};
  spec.V = Potential::exp_poly_log(1.0, 1.0, 0.0, 0.0);
  spec.kappa = KappaFunction::standard(spec.f, 1.0, 1.0);
  const auto k = profile_constants(spec, ProfileFunction::log_power(1.0));
  ASSERT_EQ(k.first.kind, ConstantKind::Finite);
  ASSERT_EQ(k.second.kind, ConstantKind::Finite);
  EXPECT_NEAR(k.first.value, 0.5, 0.025);
  EXPECT_NEAR(k.second.value, 0.5, 0.025);
}

TEST(Catalogue, ClosedFormConstants) {
  EscapeCase c;
  c.regime = "confining";
  c.f = {1, 1.0, 1.0, 0.5, 1.0};  // L2
  c.eta = 1.0;
  c.vartheta = 2.0;
  auto e = escape_constant(c);
  EXPECT_NEAR(e.value, std::pow(2.0, -0.5), 1e-15);
  EXPECT_NEAR(e.tau(std::exp(9.0)), 3.0, 1e-10);

  c.eta = 0.0;
  c.vartheta = 0.0;
  c.rho = 2.0;
  e = escape_constant(c);
  EXPECT_NEAR(e.value, std::pow(2.0, -2.0), 1e-15);  // (2 mu)^{-1/beta}

  c.f = {1, 1.0, 0.0, 0.0, 3.0};  // L1, polynomial potential
  c.delta = 1.5;
  EXPECT_EQ(escape_constant(c).value, 0.0);
  c.delta = 1.0;
  EXPECT_TRUE(std::isinf(escape_constant(c).value));

  EscapeCase ou;
  ou.regime = "ou";
  ou.gamma = 4.0;
  EXPECT_NEAR(escape_constant(ou).value, 0.5, 1e-15);

  EscapeCase well;
  well.regime = "finite_well";
  well.lambda0 = -0.5;
  EXPECT_NEAR(escape_constant(well).value, 0.5, 1e-15);

  EscapeCase dec;
  dec.regime = "decaying";
  dec.f = {1, 1.0, 1.0, 1.0, 2.0};
  dec.low_lying = false;
  dec.lambda0 = -0.25;
  dec.theta = 1.0;
  e = escape_constant(dec);
  EXPECT_TRUE(e.lower_bound);
  EXPECT_NEAR(e.value, 1.0, 1e-15);
}

TEST(Catalogue, UncataloguedRegimeRaises) {
  EscapeCase c;
  c.regime = "confining";
  c.f = {1, 1.0, 1.0, 2.0, 0.0};
  try {
    escape_constant(c);
    FAIL() << "expected UncataloguedRegime";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UncataloguedRegime);
  }
  c.regime = "galactic";
  EXPECT_THROW(escape_constant(c), Error);
}

TEST(Empirical, ScaledProfileStopsExceeding) {
  const auto xs = sample_stationary(gstlab::testing::ou_solution(), 100000, RngSpec{17, 0});
  std::vector<double> a(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) a[i] = std::abs(xs[i]);
  const auto base = empirical_limsup(a, ProfileFunction::log_power(2.0), {0.5, 1.0});
  const auto big = empirical_limsup(a, ProfileFunction::log_power(2.0, 10.0), {0.5, 1.0});
  EXPECT_EQ(big.exceed_count[1], 0);
  EXPECT_EQ(big.last_exceed[1], 0);
  EXPECT_GT(base.exceed_count[0], 0);
  EXPECT_NEAR(base.c_hat, 1.0, 0.2);
  EXPECT_LE(base.band_lo, base.c_hat);
  EXPECT_GE(base.band_hi, base.c_hat);

  const auto again = empirical_limsup(a, ProfileFunction::log_power(2.0), {0.5, 1.0});
  EXPECT_EQ(again.trace_ratio, base.trace_ratio);
  EXPECT_EQ(again.exceed_count, base.exceed_count);
  EXPECT_THROW(empirical_limsup(std::span<const double>(a.data(), 999), ProfileFunction::log_power(2.0), {1.0}),
               Error);
}
