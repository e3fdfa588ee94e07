#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "gstlab/errors.hpp"
#include "gstlab/simulate.hpp"

using namespace gstlab;
using gstlab::testing::ou_solution;
using gstlab::testing::stable_solution;

TEST(Rng, SameSpecSameStream) {
  const RngSpec a{42, 3};
  auto e1 = a.engine(), e2 = a.engine();
  for (int i = 0; i < 100; ++i) EXPECT_EQ(e1(), e2());
  EXPECT_NE(a.derive(0).engine()(), a.derive(1).engine()());
  EXPECT_NE((RngSpec{42, 3}.engine()()), (RngSpec{42, 4}.engine()()));
  EXPECT_NE((RngSpec{42, 3}.engine()()), (RngSpec{43, 3}.engine()()));
}

TEST(Ks, UniformSamplesAndCriticalValue) {
  std::vector<double> s;
  for (int i = 0; i < 1000; ++i) s.push_back((i + 0.5) / 1000.0);
  EXPECT_NEAR(ks_statistic(s, [](double x) { return std::clamp(x, 0.0, 1.0); }), 0.0005, 1e-12);
  EXPECT_NEAR(ks_critical_1pct(10000), 0.01628, 1e-12);
  EXPECT_NEAR(ks_two_sample({1, 2, 3}, {1, 2, 3}), 0.0, 1e-15);
  EXPECT_NEAR(ks_two_sample({1, 2}, {3, 4}), 1.0, 1e-15);
  EXPECT_NEAR(ks_discrete({0, 0, 1, 1}, {0.5, 0.5}), 0.0, 1e-15);
}

TEST(Stationary, OuVarianceAndKs) {
  const auto& sol = ou_solution();
  const std::size_t n = 1000000;
  const auto xs = sample_stationary(sol, n, RngSpec{2024, 0});
  ASSERT_EQ(xs.size(), n);
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= n - 1;
  EXPECT_NEAR(var, 0.5, 0.01);
  EXPECT_LT(ks_statistic(xs, grid_cdf(sol)), ks_critical_1pct(n));
}

TEST(Stationary, Deterministic) {
  const auto& sol = ou_solution();
  EXPECT_EQ(sample_stationary(sol, 1000, RngSpec{5, 1}), sample_stationary(sol, 1000, RngSpec{5, 1}));
  EXPECT_NE(sample_stationary(sol, 1000, RngSpec{5, 1}), sample_stationary(sol, 1000, RngSpec{5, 2}));
  EXPECT_THROW(sample_stationary(sol, 0, RngSpec{}), Error);
}

TEST(Stationary, TwoDimensionalMarginals) {
  SolveOptions o;
  o.auto_expand = false;
  const auto sol = solve(LevyModel::brownian(2, 1.0), Potential::polynomial(1, 0.5), Grid{2, 8.0, 64}, o);
  const auto xy = sample_stationary(sol, 200000, RngSpec{9, 0});
  ASSERT_EQ(xy.size(), 400000u);
  // Product Gaussian with variance 1/2 per axis, independent coordinates.
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < xy.size(); i += 2) {
    sxx += xy[i] * xy[i];
    syy += xy[i + 1] * xy[i + 1];
    sxy += xy[i] * xy[i + 1];
  }
  EXPECT_NEAR(sxx / 200000, 0.5, 0.01);
  EXPECT_NEAR(syy / 200000, 0.5, 0.01);
  EXPECT_NEAR(sxy / 200000, 0.0, 0.01);
}

TEST(Chain, StationaryStartStaysStationary) {
  const auto& sol = ou_solution();
  const auto K = intrinsic_kernel(sol, 1.0, 40);
  const KernelChain chain(K, sol.grid);
  constexpr int kChains = 4000;
  std::vector<std::size_t> at1, at10, at100;
  for (int c = 0; c < kChains; ++c) {
    auto eng = RngSpec{77, 0}.derive(c).engine();
    std::size_t w = chain.sample_stationary_index(eng);
    for (int s = 1; s <= 100; ++s) {
      w = chain.step(w, eng);
      if (s == 1) at1.push_back(w);
      if (s == 10) at10.push_back(w);
      if (s == 100) at100.push_back(w);
    }
  }
  const double crit = ks_critical_1pct(kChains);
  EXPECT_LT(ks_discrete(at1, chain.stationary_mass()), crit);
  EXPECT_LT(ks_discrete(at10, chain.stationary_mass()), crit);
  EXPECT_LT(ks_discrete(at100, chain.stationary_mass()), crit);
}

TEST(Chain, LagOneCorrelationMatchesSpectralGap) {
  // For OU the odd observable x is the first eigenfunction ratio, so
  // corr(X_k, X_{k+1}) = e^{-gap t} exactly.
  const auto& sol = ou_solution();
  const auto K = intrinsic_kernel(sol, 1.0, 40);
  const auto path = simulate_chain(K, sol.grid, 0.0, 200000, RngSpec{31, 0});
  const std::size_t n = path.size();
  double m = 0, v = 0, c = 0;
  for (std::size_t i = 100; i < n; ++i) m += path.state(i);
  m /= n - 100;
  for (std::size_t i = 100; i + 1 < n; ++i) {
    v += (path.state(i) - m) * (path.state(i) - m);
    c += (path.state(i) - m) * (path.state(i + 1) - m);
  }
  EXPECT_NEAR(c / v, std::exp(-sol.gap()), 0.015);
}

TEST(Chain, DeterministicPaths) {
  const auto& sol = ou_solution();
  const auto K = intrinsic_kernel(sol, 1.0, 40);
  const auto a = simulate_chain(K, sol.grid, 0.5, 1000, RngSpec{8, 2});
  const auto b = simulate_chain(K, sol.grid, 0.5, 1000, RngSpec{8, 2});
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.times, b.times);
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_GT(a.times[i], a.times[i - 1]);
}

TEST(JumpTail, StableClosedForm) {
  // One-sided N(r) = c / r with c = 1/pi for alpha = 1.
  const JumpTail tail(LevyModel::stable(1, 1.0), 1e-3, 1e4);
  for (double r : {0.01, 0.5, 3.0, 500.0}) {
    EXPECT_NEAR(tail.tail(r) * r * M_PI, 1.0, 1e-6) << r;
    EXPECT_NEAR(tail.inverse(tail.tail(r)) / r, 1.0, 1e-6) << r;
  }
  EXPECT_THROW(JumpTail(LevyModel::brownian(1, 1.0), 1e-3, 10.0), Error);
}

TEST(Sde, OuMarginalAfterBurnIn) {
  const auto& sol = ou_solution();
  const GstFields fields(sol, LevyModel::brownian(1, 1.0));
  const SdeSampler sampler(fields, 0.01, SdeOptions{50.0});
  std::vector<double> xs;
  long long clamps = 0;
  for (int p = 0; p < 1000; ++p) {
    const auto path = sampler.run(0.0, 50.0, RngSpec{12, 0}.derive(p));
    xs.push_back(path.states.back());
    clamps += path.clamp_count;
  }
  EXPECT_LT(ks_statistic(xs, grid_cdf(sol)), ks_critical_1pct(xs.size()));
  EXPECT_EQ(clamps, 0);
}

TEST(Sde, Deterministic) {
  const GstFields fields(stable_solution(), LevyModel::stable(1, 1.0));
  SdeOptions o;
  o.log_jumps = true;
  const auto a = simulate_sde(fields, 0.0, 0.0025, 20.0, RngSpec{4, 4}, o);
  const auto b = simulate_sde(fields, 0.0, 0.0025, 20.0, RngSpec{4, 4}, o);
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.jump_log.size(), b.jump_log.size());
  EXPECT_EQ(a.accepted, b.accepted);
  for (double x : a.states) EXPECT_TRUE(std::isfinite(x));
}

TEST(Sde, RejectsOversizedStepAndMisalignedHorizon) {
  const GstFields fields(ou_solution(), LevyModel::brownian(1, 1.0));
  try {
    SdeSampler(fields, 10.0);
    FAIL() << "expected DtTooLarge";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DtTooLarge);
  }
  EXPECT_THROW(simulate_sde(fields, 0.0, 0.01, 1.005, RngSpec{}), Error);
}

TEST(Sde, ZeroPotentialHasNoGroundState) {
  const auto flat = Potential::custom([](double) { return 0.0; }, PotentialKind::Decaying, "zero");
  try {
    solve(LevyModel::stable(1, 1.0), flat, Grid{1, 20.0, 256});
    FAIL() << "expected NoBoundState";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoBoundState);
  }
}

namespace {
// |X| at skeleton times from the stable SDE (1000 paths, 100 records each).
std::vector<double> stable_sde_abs(const GstFields& fields, std::vector<JumpRecord>* jumps, double* time) {
  SdeOptions o;
  o.log_jumps = jumps != nullptr;
  const SdeSampler sampler(fields, 0.0025, o);
  std::vector<double> out;
  *time = 0.0;
  for (int p = 0; p < 1000; ++p) {
    const auto path = sampler.run(0.0, 110.0, RngSpec{515, 0}.derive(p));
    for (std::size_t i = 0; i < path.size(); ++i)
      if (path.times[i] > 10.0) out.push_back(std::abs(path.state(i)));
    if (jumps) {
      for (const auto& j : path.jump_log)
        if (j.accepted && j.time > 10.0) jumps->push_back(j);
      *time += 100.0;
    }
  }
  return out;
}
}  // namespace

TEST(Sde, StableAgreesWithChainAndRecoversLevyMeasure) {
  const auto& sol = stable_solution();
  const auto model = LevyModel::stable(1, 1.0);
  const GstFields fields(sol, model);
  std::vector<JumpRecord> jumps;
  double time = 0.0;
  const auto sde = stable_sde_abs(fields, &jumps, &time);
  ASSERT_EQ(sde.size(), 100000u);

  // Chain states jittered uniformly within their cells (the grid density).
  const auto K = intrinsic_kernel(sol, 1.0, 30);
  const KernelChain chain(K, sol.grid);
  const double h = sol.grid.spacing();
  std::vector<double> ch;
  std::uniform_real_distribution<double> jitter(-0.5 * h, 0.5 * h);
  for (int c = 0; c < 10000; ++c) {
    auto eng = RngSpec{516, 0}.derive(c).engine();
    std::size_t w = chain.sample_stationary_index(eng);
    for (int r = 0; r < 10; ++r) {
      w = chain.step(w, eng);
      ch.push_back(std::abs(chain.position(w) + jitter(eng)));
    }
  }
  EXPECT_LT(ks_two_sample(sde, ch), 0.02);

  // Accepted jumps weighted by 1/bias have intensity nu(z) dz per unit time.
  const std::vector<double> edges{fields.eps_jump(), 0.2, 0.5, 1.5, 5.0};
  std::vector<double> w(edges.size() - 1, 0.0), ref(edges.size() - 1);
  for (const auto& j : jumps) {
    const double a = std::abs(j.z);
    for (std::size_t b = 0; b + 1 < edges.size(); ++b)
      if (a >= edges[b] && a < edges[b + 1]) w[b] += 1.0 / fields.bias(j.x, j.z);
  }
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) ref[b] = 2.0 / M_PI * (1.0 / edges[b] - 1.0 / edges[b + 1]);
  const double tw = std::accumulate(w.begin(), w.end(), 0.0), tr = std::accumulate(ref.begin(), ref.end(), 0.0);
  for (std::size_t b = 0; b < w.size(); ++b)
    EXPECT_NEAR((w[b] / tw) / (ref[b] / tr), 1.0, 0.05) << "bin " << b;
  EXPECT_NEAR(tw / time / tr, 1.0, 0.05);
}

TEST(Parallel, CoversEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                 if (i == 7) throw Error(ErrorCode::Io, "boom");
               }),
               Error);
}
