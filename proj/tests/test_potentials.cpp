#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "gstlab/errors.hpp"
#include "gstlab/potentials.hpp"

using namespace gstlab;

TEST(Potential, FamilyFormulas) {
  EXPECT_DOUBLE_EQ(Potential::polynomial(1).at(2.0), 4.0);
  EXPECT_DOUBLE_EQ(Potential::polynomial(2, 3.0, -1.0).at(2.0), 47.0);
  EXPECT_DOUBLE_EQ(Potential::poschl_teller(1.0, 1.0).at(0.0), -1.0);
  EXPECT_DOUBLE_EQ(Potential::morse(1.0, 1.0, 0.0).at(0.0), -1.0);
  EXPECT_DOUBLE_EQ(Potential::well(2.0, 1.0).at(1.0), -2.0);
  EXPECT_DOUBLE_EQ(Potential::well(2.0, 1.0).at(1.5), 0.0);
  EXPECT_DOUBLE_EQ(Potential::double_well(2.0).at(1.0), -1.0);
  EXPECT_NEAR(Potential::coulomb(2.0, 1.0).at(std::sqrt(3.0)), -1.0, 1e-15);
  EXPECT_NEAR(Potential::yukawa(1.0, 0.5, 1.0).at(0.0), -1.0, 1e-15);
  EXPECT_NEAR(Potential::exp_poly_log(1.0, 0.5, 2.0, 1.0).at(4.0), std::exp(2.0) * 16.0 * std::log(5.0), 1e-10);
  EXPECT_NEAR(Potential::ornstein_uhlenbeck(2.0).at(1.0), 2.0 - 1.0, 1e-15);
}

TEST(Potential, RadialInTwoDimensions) {
  const double x[2] = {3.0, 4.0};
  EXPECT_DOUBLE_EQ(potential_eval(Potential::polynomial(1), x), 25.0);
}

TEST(Potential, Kinds) {
  EXPECT_EQ(Potential::polynomial(2).kind(), PotentialKind::Confining);
  EXPECT_EQ(Potential::exp_poly_log(0, 0, 2, 0).kind(), PotentialKind::Confining);
  for (const auto& v : {Potential::well(1, 1), Potential::coulomb(1), Potential::yukawa(1, 1),
                        Potential::poschl_teller(1, 1), Potential::morse(1, 1, 0)}) {
    EXPECT_EQ(v.kind(), PotentialKind::Decaying) << to_string(v.family());
    EXPECT_NEAR(v.radial(1e4), 0.0, 1e-3) << to_string(v.family());
  }
}

TEST(Potential, FamilyNamesRoundTrip) {
  for (auto f : {PotentialFamily::Polynomial, PotentialFamily::DoubleWell, PotentialFamily::ExpPolyLog,
                 PotentialFamily::Well, PotentialFamily::Coulomb, PotentialFamily::Yukawa,
                 PotentialFamily::PoschlTeller, PotentialFamily::Morse}) {
    EXPECT_EQ(potential_family_from_string(to_string(f)), f);
  }
  EXPECT_THROW(potential_family_from_string("harmonic"), Error);
}

TEST(Potential, ParamsRoundTrip) {
  for (const auto& v : {Potential::polynomial(3, 2.0, 1.0), Potential::double_well(1.5),
                        Potential::exp_poly_log(1, 0.5, 2, 1), Potential::well(3, 2),
                        Potential::coulomb(1, 0.5), Potential::yukawa(1, 2, 0.5),
                        Potential::poschl_teller(2, 3), Potential::morse(1, 2, 3)}) {
    const auto w = Potential::from_params(v.family(), v.params());
    EXPECT_EQ(w.params(), v.params());
    for (double x : {0.0, 0.7, 2.5, 9.0}) EXPECT_DOUBLE_EQ(w.at(x), v.at(x));
  }
}

TEST(Potential, RejectsInvalidParameters) {
  EXPECT_THROW(Potential::polynomial(1, -1.0), Error);
  EXPECT_THROW(Potential::exp_poly_log(-1, 1, 0, 0), Error);
  EXPECT_THROW(Potential::well(1.0, 0.0), Error);
}

TEST(Envelope, HarmonicClosedForm) {
  const auto V = Potential::polynomial(1);
  const double x3[1] = {3.0};
  auto e = unit_ball_envelope(V, x3);
  EXPECT_DOUBLE_EQ(e.v_up, 16.0);
  EXPECT_DOUBLE_EQ(e.v_low, 4.0);
  const double xh[1] = {0.5};
  e = unit_ball_envelope(V, xh);
  EXPECT_DOUBLE_EQ(e.v_up, 2.25);
  EXPECT_DOUBLE_EQ(e.v_low, 0.0);
}

TEST(Envelope, WellStraddlesEdge) {
  const auto V = Potential::well(2.0, 1.0);
  const double x[1] = {1.5};
  const auto e = unit_ball_envelope(V, x);
  EXPECT_DOUBLE_EQ(e.v_low, -2.0);
  EXPECT_DOUBLE_EQ(e.v_up, 0.0);
}

TEST(Envelope, CustomIsSampled) {
  const auto V = Potential::custom([](double x) { return std::sin(x); }, PotentialKind::Decaying);
  const double x[1] = {0.0};
  const auto e = unit_ball_envelope(V, x);
  EXPECT_NEAR(e.v_up, std::sin(1.0), 1e-12);
  EXPECT_NEAR(e.v_low, -std::sin(1.0), 1e-12);
}

TEST(Profiles, HarmonicValues) {
  const auto g = g_profiles(Potential::polynomial(1), 3.0, 1);
  EXPECT_DOUBLE_EQ(g.g_up, 1.0 / 16.0);
  EXPECT_DOUBLE_EQ(g.g_low, 1.0 / 4.0);
  EXPECT_THROW(g_profiles(Potential::polynomial(1), 0.5, 1), Error);
}

TEST(Profiles, LogFormFiniteAtHugeRadius) {
  const auto V = Potential::exp_poly_log(1.0, 1.0, 2.0, 1.0);
  // r = e^5000: log V ~ e^L (about 1e2171) only fits in long double.
  const long double L = 5000.0L;
  const auto [lu, ll] = log_g_profiles(V, L, 1);
  EXPECT_TRUE(std::isfinite(lu));
  EXPECT_TRUE(std::isfinite(ll));
  EXPECT_NEAR(static_cast<double>(-ll / std::exp(L)), 1.0, 1e-6);
  // At r = e^5 the unit-ball shift (r -/+ 1) separates the two profiles by about 2.
  const auto [su, sl] = log_g_profiles(V, 5.0L, 1);
  EXPECT_NEAR(static_cast<double>(sl - su), 2.0, 0.1);
}

TEST(Profiles, DecayingFlatBeyondRadius) {
  for (const auto& V : {Potential::well(1, 1), Potential::coulomb(2), Potential::morse(1, 1, 2)}) {
    const double r0 = V.radius_beyond_which_flat();
    ASSERT_TRUE(std::isfinite(r0));
    for (double r : {r0 + 0.5, r0 + 10.0, r0 + 1e3}) {
      const auto g = g_profiles(V, r, 1);
      EXPECT_EQ(g.g_up, 1.0);
      EXPECT_EQ(g.g_low, 1.0);
    }
  }
  EXPECT_TRUE(std::isinf(Potential::polynomial(1).radius_beyond_which_flat()));
}

TEST(AlmostConstant, PolynomialHoldsExponentialFails) {
  EXPECT_TRUE(almost_constant_diagnostic(Potential::polynomial(1), 1).holds);
  EXPECT_FALSE(almost_constant_diagnostic(Potential::exp_poly_log(1.0, 1.0, 0, 0), 1).holds);
}
