#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "gstlab/eigensolver.hpp"
#include "gstlab/errors.hpp"
#include "gstlab/spectral.hpp"

using namespace gstlab;
using gstlab::testing::ou_phi0;

namespace {
Potential zero_potential() {
  return Potential::custom([](double) { return 0.0; }, PotentialKind::Confining, "zero");
}
double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}
}  // namespace

TEST(Grid, CellCentredSymmetricNodes) {
  const Grid g{1, 4.0, 64};
  EXPECT_DOUBLE_EQ(g.spacing(), 0.125);
  for (int j = 0; j < g.n; ++j) {
    EXPECT_DOUBLE_EQ(g.node(j), -g.node(g.n - 1 - j));
    EXPECT_NE(g.node(j), 0.0);
  }
  EXPECT_THROW((Grid{1, 4.0, 32}.validate()), Error);
  EXPECT_THROW((Grid{1, 4.0, 100}.validate()), Error);
  EXPECT_THROW((Grid{3, 4.0, 64}.validate()), Error);
}

TEST(Operator, ConstantsInKernelOfLaplacian) {
  const auto op = build_operator(LevyModel::brownian(1, 2.0), zero_potential(), Grid{1, 5.0, 128});
  std::vector<double> in(128, 1.0), out(128);
  op.apply(in, out);
  EXPECT_LT(max_abs(out), 1e-12);
}

TEST(Operator, FourierModeIsEigenvector) {
  const Grid g{1, M_PI, 128};  // period 2 pi, integer wave numbers
  const auto op = build_operator(LevyModel::stable(1, 1.0), zero_potential(), g);
  for (int k : {1, 5, 17}) {
    std::vector<double> in(g.n), out(g.n);
    for (int j = 0; j < g.n; ++j) in[j] = std::cos(k * g.node(j));
    op.apply(in, out);
    for (int j = 0; j < g.n; ++j) EXPECT_NEAR(out[j], k * in[j], 1e-10);
  }
}

TEST(Operator, OuGroundStateResidual) {
  const Grid g{1, 12.0, 1024};
  const auto op = build_operator(LevyModel::brownian(1, 1.0), Potential::ornstein_uhlenbeck(1.0), g);
  std::vector<double> phi(g.n), out(g.n);
  for (int j = 0; j < g.n; ++j) phi[j] = ou_phi0(g.node(j));
  op.apply(phi, out);
  double r2 = 0.0;
  for (double v : out) r2 += v * v * g.spacing();
  EXPECT_LT(std::sqrt(r2), 1e-6);
}

TEST(Operator, DenseMatrixMatchesFftApply) {
  const Grid g{1, 8.0, 128};
  const auto op = build_operator(LevyModel::stable(1, 1.3), Potential::polynomial(1), g);
  const Eigen::MatrixXd H = op.dense_matrix();
  EXPECT_LT((H - H.transpose()).cwiseAbs().maxCoeff(), 1e-10);
  std::vector<double> v(g.n), out(g.n);
  for (int j = 0; j < g.n; ++j) v[j] = std::exp(-0.3 * g.node(j) * g.node(j)) * (1.0 + 0.2 * g.node(j));
  op.apply(v, out);
  const Eigen::VectorXd ref = H * Eigen::Map<const Eigen::VectorXd>(v.data(), g.n);
  for (int j = 0; j < g.n; ++j) EXPECT_NEAR(out[j], ref[j], 1e-9 * (1.0 + std::abs(ref[j])));
}

TEST(Solve, OuClosedForm) {
  const auto& sol = gstlab::testing::ou_solution();
  EXPECT_NEAR(sol.lambda0, 0.0, 1e-8);
  EXPECT_NEAR(sol.lambda1, 1.0, 1e-8);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_NEAR(sol.eigenvalues[k], static_cast<double>(k), 1e-7);
  const double h = sol.grid.spacing();
  double mass = 0.0;
  for (int j = 0; j < sol.grid.n; ++j) {
    EXPECT_GT(sol.phi0[j], 0.0);
    EXPECT_NEAR(sol.phi0[j], ou_phi0(sol.grid.node(j)), 1e-8);
    mass += sol.phi0[j] * sol.phi0[j] * h;
  }
  EXPECT_NEAR(mass, 1.0, 1e-10);
  EXPECT_LE(sol.residual, 1e-8);
  EXPECT_LT(sol.boundary_ratio, 1e-10);
}

TEST(Solve, IterativeMatchesDenseOracle) {
  const Grid g{1, 10.0, 256};
  const auto model = LevyModel::stable(1, 1.0);
  const auto V = Potential::polynomial(1);
  SolveOptions o;
  o.auto_expand = false;
  const auto sol = solve(model, V, g, o);
  const auto dense = dense_spectrum(build_operator(model, V, g));
  EXPECT_NEAR(sol.lambda0, dense.values[0], 1e-9);
  EXPECT_NEAR(sol.lambda1, dense.values[1], 1e-9);
  // Values measured on this grid; both routes agree to 12 digits.
  EXPECT_NEAR(sol.lambda0, 1.010611890716, 1e-9);
  EXPECT_NEAR(sol.lambda1, 2.338191462743, 1e-9);
}

TEST(Solve, GridRefinementConverges) {
  const auto model = LevyModel::stable(1, 1.5);
  const auto V = Potential::polynomial(1);
  SolveOptions o;
  o.auto_expand = false;
  const auto a = solve(model, V, Grid{1, 12.0, 512}, o);
  const auto b = solve(model, V, Grid{1, 12.0, 1024}, o);
  EXPECT_LT(std::abs(a.lambda0 - b.lambda0), 1e-4);
}

TEST(Solve, AutoExpandMeetsBoundaryTarget) {
  const auto sol = solve(LevyModel::brownian(1, 1.0), Potential::polynomial(1), Grid{1, 3.0, 128});
  EXPECT_LT(sol.boundary_ratio, 1e-10);
  EXPECT_GT(sol.grid.half_width, 3.0);
}

// mpmath root of the even-state matching condition.
TEST(FiniteWell, TranscendentalEigenvalueOracle) {
  EXPECT_NEAR(well_eigenvalue(1.0, 1.0), -0.60389783386339455455, 1e-12);
  EXPECT_NEAR(well_eigenvalue(1.0, 2.0), -1.4696874658908624992, 1e-12);
  EXPECT_NEAR(well_eigenvalue(1.0, 4.0), -3.3370228691570162197, 1e-12);
  EXPECT_NEAR(well_eigenvalue(1.0, 100.0), -98.924124203267793122, 1e-10);
  EXPECT_NEAR(well_eigenvalue(1.0, 1e4), -9998.7835636310478323, 1e-8);
  EXPECT_THROW(well_eigenvalue(0.0, 1.0), Error);
}

TEST(FiniteWell, DeepWellApproachesInfiniteWell) {
  // v - |lambda0| -> pi^2/8 (the infinite well of width 2) from below.
  double prev = 0.0;
  for (double v : {1.0, 4.0, 100.0, 1e4}) {
    const double gap = v + well_eigenvalue(1.0, v);
    EXPECT_GT(gap, prev);
    prev = gap;
  }
  EXPECT_NEAR(prev / (M_PI * M_PI / 8.0), 1.0, 0.02);
}

TEST(FiniteWell, GridMatchesClosedForm) {
  const auto& sol = gstlab::testing::well_solution();
  EXPECT_NEAR(sol.lambda0, well_eigenvalue(1.0, 1.0), 1e-3);
}

TEST(FiniteWell, DeeperWellLowersGroundEnergy) {
  double prev = INFINITY;
  for (double v : {1.0, 2.0, 4.0}) {
    const auto sol = solve(LevyModel::brownian(1, 1.0), Potential::well(v, 1.0), Grid{1, 20.0, 1024});
    EXPECT_LE(sol.lambda0, prev);
    prev = sol.lambda0;
  }
}

TEST(Solve, DecayingWithoutBoundStateThrows) {
  // A repulsive bump has no eigenvalue below the essential spectrum.
  const auto bump = Potential::custom([](double x) { return std::abs(x) < 1.0 ? 1.0 : 0.0; },
                                      PotentialKind::Decaying, "bump");
  try {
    solve(LevyModel::brownian(1, 1.0), bump, Grid{1, 20.0, 512});
    FAIL() << "expected NoBoundState";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoBoundState);
  }
}

TEST(Kernel, FeynmanKacSymmetricAndTruncated) {
  const auto& sol = gstlab::testing::ou_solution();
  const auto K = fk_kernel(sol, 1.0, 30);
  EXPECT_LT((K.u - K.u.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(K.truncation_estimate, 1e-6);
}

TEST(Artifact, RoundTripPreservesContent) {
  const auto& sol = gstlab::testing::ou_solution();
  const auto path = (std::filesystem::temp_directory_path() / "gstlab_roundtrip.gst").string();
  save_solution(sol, path, R"({"config_hash":"abc"})");
  const auto back = load_solution(path);
  EXPECT_EQ(back.grid, sol.grid);
  EXPECT_EQ(back.phi0, sol.phi0);
  EXPECT_EQ(back.eigenvalues, sol.eigenvalues);
  EXPECT_EQ(back.modes, sol.modes);
  EXPECT_EQ(back.model_hash, sol.model_hash);
  EXPECT_EQ(solution_content_hash(back), solution_content_hash(sol));
  std::filesystem::remove(path);
}

TEST(Artifact, CorruptionDetected) {
  const auto& sol = gstlab::testing::ou_solution();
  const auto path = (std::filesystem::temp_directory_path() / "gstlab_corrupt.gst").string();
  save_solution(sol, path);
  {
    std::FILE* f = std::fopen(path.c_str(), "r+b");
    ASSERT_NE(f, nullptr);
    std::fseek(f, -100, SEEK_END);
    const unsigned char junk = 0x5a;
    std::fwrite(&junk, 1, 1, f);
    std::fclose(f);
  }
  EXPECT_THROW(load_solution(path), Error);
  std::filesystem::remove(path);
}

TEST(Eigensolver, DiagonalMatrix) {
  const std::size_t n = 50;
  LinearMap H = [](std::span<const double> in, std::span<double> out) {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = (i + 1.0) * in[i];
  };
  LinearMap inv = [](std::span<const double> in, std::span<double> out) {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] / (i + 1.0);
  };
  EigenOptions o;
  o.n_eigen = 3;
  const auto r = smallest_eigenpairs(H, inv, n, o);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.values[0], 1.0, 1e-9);
  EXPECT_NEAR(r.values[1], 2.0, 1e-9);
  EXPECT_NEAR(r.values[2], 3.0, 1e-9);
}

TEST(Eigensolver, PcgSolvesSpdSystem) {
  const std::size_t n = 40;
  LinearMap A = [](std::span<const double> in, std::span<double> out) {
    const std::size_t m = in.size();
    for (std::size_t i = 0; i < m; ++i)
      out[i] = 4.0 * in[i] - (i > 0 ? in[i - 1] : 0.0) - (i + 1 < m ? in[i + 1] : 0.0);
  };
  LinearMap I = [](std::span<const double> in, std::span<double> out) {
    std::copy(in.begin(), in.end(), out.begin());
  };
  std::vector<double> b(n, 1.0), x(n, 0.0), Ax(n);
  const auto r = pcg(A, I, b, x, 1e-12, 200);
  EXPECT_TRUE(r.converged);
  A(x, Ax);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(Ax[i], 1.0, 1e-10);
}
