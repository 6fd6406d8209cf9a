#include <gtest/gtest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "wsp/error.hpp"
#include "wsp/scio.hpp"
#include "wsp/simulate.hpp"
#include "wsp/theory.hpp"

namespace wsp {
namespace {

constexpr double kKkt = 1e-6;

void expect_kkt(const SymMatrix& s, const PrecisionEstimate& est) {
  const auto rep = kkt_report(s, est);
  EXPECT_LE(rep.max_dual, kKkt);
  EXPECT_LE(rep.max_stationarity, kKkt);
  EXPECT_TRUE(est.converged());
}

TEST(ScioColumn, IdentitySoftThreshold) {
  const auto sol = scio_column(SymMatrix::identity(5), 0, 0.2);
  EXPECT_TRUE(sol.converged);
  EXPECT_NEAR(sol.beta[0], 0.8, 1e-12);
  for (std::size_t j = 1; j < 5; ++j) EXPECT_EQ(sol.beta[j], 0.0);
}

TEST(ScioColumn, FullShrinkage) {
  for (double lambda : {1.0, 1.5, 1e6}) {
    const auto sol = scio_column(SymMatrix::identity(4), 0, lambda);
    for (double b : sol.beta) EXPECT_EQ(b, 0.0);
  }
}

TEST(ScioColumn, TwoByTwoClosedFormAgainstIsta) {
  const SymMatrix s{{1, 0.5}, {0.5, 1}};
  const auto sol = scio_column(s, 0, 0.1);
  const auto ista = testing::ista_column(s, 0, 0.1, 20000);
  EXPECT_NEAR(ista[0], 17.0 / 15.0, 1e-10);
  EXPECT_NEAR(ista[1], -7.0 / 15.0, 1e-10);
  EXPECT_NEAR(sol.beta[0], 17.0 / 15.0, 1e-10);
  EXPECT_NEAR(sol.beta[1], -7.0 / 15.0, 1e-10);
  // Gradient sits at exactly −λ and +λ on the two active coordinates.
  EXPECT_LE(sol.kkt.stationarity, 1e-10);
  EXPECT_LE(sol.kkt.dual, 1e-10);
}

TEST(ScioColumn, MatchesIstaOnRandomSpd) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const SymMatrix s = testing::random_spd(8, seed, 0.3);
    const std::size_t i = seed % 8;
    const auto sol = scio_column(s, i, 0.05);
    const auto ista = testing::ista_column(s, i, 0.05, 200000);
    for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(sol.beta[j], ista[j], 1e-7) << seed << " " << j;
  }
}

TEST(ScioColumn, NonPositiveDiagonal) {
  try {
    scio_column(SymMatrix{{1, 0}, {0, 0}}, 0, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveDiagonal);
  }
}

TEST(ScioColumn, SweepCapFlagsNonConverged) {
  SolverOptions opts;
  opts.max_sweeps = 1;
  const auto sol = scio_column(invert_spd(make_toeplitz_precision(20, 0.8)), 3, 0.01, std::nullopt, opts);
  EXPECT_FALSE(sol.converged);
  EXPECT_EQ(sol.sweeps, 1);
}

TEST(ScioColumn, ObjectiveNonIncreasingAcrossSweeps) {
  SolverOptions opts;
  opts.record_objective = true;
  opts.polish = false;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SymMatrix s = testing::random_spd(15, seed, 0.05);
    const auto sol = scio_column(s, seed % 15, 0.02, std::nullopt, opts);
    ASSERT_GE(sol.objective_trace.size(), 2u);
    for (std::size_t k = 1; k < sol.objective_trace.size(); ++k)
      EXPECT_LE(sol.objective_trace[k], sol.objective_trace[k - 1] + 1e-14);
  }
}

// A floor of 1e-3 under unit-scale entries gives condition numbers near
// 1e4, where plain cyclic descent crawls.
TEST(ScioColumn, IllConditionedColumnsConverge) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const SymMatrix s = testing::random_spd(40, seed, 1e-3);
    const auto est = scio_estimate(s, 0.01);
    expect_kkt(s, est);
    for (const auto& c : est.columns) EXPECT_LT(c.sweeps, 1000);
  }
}

TEST(ScioColumn, ObjectiveNonIncreasingWithNewtonSteps) {
  SolverOptions opts;
  opts.record_objective = true;
  const SymMatrix s = testing::random_spd(25, 3, 1e-3);
  for (std::size_t i = 0; i < 25; i += 6) {
    const auto sol = scio_column(s, i, 0.01, std::nullopt, opts);
    for (std::size_t k = 1; k < sol.objective_trace.size(); ++k)
      EXPECT_LE(sol.objective_trace[k], sol.objective_trace[k - 1] + 1e-12);
  }
}

TEST(ScioColumn, WarmStartsReachTheSameMinimizer) {
  const SymMatrix s = testing::random_spd(12, 9, 0.2);
  std::vector<double> wild(12);
  for (std::size_t j = 0; j < 12; ++j) wild[j] = std::sin(static_cast<double>(j)) * 3.0;
  for (std::size_t i = 0; i < 12; ++i) {
    const auto cold = scio_column(s, i, 0.03);
    const auto warm = scio_column(s, i, 0.03, std::span<const double>(wild));
    for (std::size_t j = 0; j < 12; ++j) EXPECT_NEAR(cold.beta[j], warm.beta[j], 1e-7);
  }
}

TEST(Symmetrize, SmallerMagnitudeWins) {
  Matrix omega_hat{{1.0, 0.3}, {-0.2, 1.0}};
  // Ω̂(0,1) = β̂ entry 0 of column 1 = 0.3; Ω̂(1,0) = −0.2.
  const SymMatrix s = symmetrize(omega_hat);
  EXPECT_EQ(s(0, 1), -0.2);
  EXPECT_EQ(s(1, 0), -0.2);
}

TEST(Symmetrize, TieKeepsUpperEntry) {
  Matrix omega_hat{{1.0, 0.4}, {-0.4, 1.0}};
  EXPECT_EQ(symmetrize(omega_hat)(0, 1), 0.4);
}

TEST(ScioEstimate, DiagonalSigma) {
  const double d[] = {2.0, 1.0};
  const SymMatrix s = SymMatrix::diagonal(d);
  const auto est = scio_estimate(s, 0.1);
  EXPECT_NEAR(est.columns[0].beta[0], 0.45, 1e-14);
  EXPECT_EQ(est.columns[0].beta[1], 0.0);
  EXPECT_NEAR(est.omega_tilde(0, 0), 0.45, 1e-14);
  EXPECT_NEAR(est.omega_tilde(1, 1), 0.9, 1e-14);
  EXPECT_EQ(est.omega_tilde(0, 1), 0.0);
}

TEST(ScioEstimate, SymmetrizationInvariants) {
  const SymMatrix s = testing::random_spd(10, 4, 0.1);
  const auto est = scio_estimate(s, 0.05);
  expect_kkt(s, est);
  const Matrix hat = est.omega_hat();
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j) {
      EXPECT_EQ(est.omega_tilde(i, j), est.omega_tilde(j, i));
      EXPECT_EQ(std::abs(est.omega_tilde(i, j)), std::min(std::abs(hat(i, j)), std::abs(hat(j, i))));
    }
}

TEST(ScioEstimate, TheoremTwoInfBoundOnExactToeplitz) {
  const SymMatrix omega = make_toeplitz_precision(10, 0.5);
  const SymMatrix sigma = invert_spd(omega);
  const double m = matrix_norm(omega, NormKind::L1);
  for (double lambda : {0.01, 0.02, 0.05}) {
    const auto est = scio_estimate(sigma, lambda);
    expect_kkt(sigma, est);
    EXPECT_LE(matrix_norm(est.omega_tilde - omega, NormKind::ElementwiseInf), 4.0 * m * lambda);
  }
}

TEST(ScioEstimate, FailingColumnIsTagged) {
  try {
    scio_estimate(SymMatrix{{1, 0}, {0, 0}}, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveDiagonal);
    EXPECT_EQ(e.where(), "scio.scio_estimate");
    EXPECT_NE(std::string(e.what()).find("column 0"), std::string::npos);
  }
}

TEST(ScioPath, TotalShrinkage) {
  const double grid[] = {1e6};
  const auto path = scio_path(correlation_of_inverse(make_toeplitz_precision(6, 0.5)), grid);
  EXPECT_EQ(matrix_norm(path.estimates[0].omega_tilde, NormKind::ElementwiseInf), 0.0);
}

TEST(ScioPath, IdentityTwoPoints) {
  const double grid[] = {0.5, 0.2};
  const auto path = scio_path(SymMatrix::identity(3), grid);
  ASSERT_EQ(path.estimates.size(), 2u);
  EXPECT_NEAR(matrix_norm(path.estimates[0].omega_tilde - 0.5 * SymMatrix::identity(3), NormKind::ElementwiseInf), 0.0, 1e-14);
  EXPECT_NEAR(matrix_norm(path.estimates[1].omega_tilde - 0.8 * SymMatrix::identity(3), NormKind::ElementwiseInf), 0.0, 1e-14);
}

TEST(ScioPath, RejectsNonDecreasingGrid) {
  const double grid[] = {0.2, 0.5};
  EXPECT_THROW(scio_path(SymMatrix::identity(2), grid), Error);
  EXPECT_THROW(scio_path(SymMatrix::identity(2), std::span<const double>{}), Error);
}

TEST(ScioPath, WarmMatchesColdOnToeplitzSampleCovariance) {
  const SymMatrix omega = make_toeplitz_precision(30, 0.5);
  const auto x = sample_gaussian(200, invert_spd(omega), 21);
  const SymMatrix s = sample_covariance(x).matrix;
  const auto grid = lambda_grid(30, 2.0);
  const auto path = scio_path(s, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto cold = scio_estimate(s, grid[k]);
    expect_kkt(s, path.estimates[k]);
    EXPECT_LE(matrix_norm(cold.omega_tilde - path.estimates[k].omega_tilde, NormKind::ElementwiseInf), 1e-8)
        << "lambda " << grid[k];
  }
}

TEST(LambdaGrid, LogSpacing) {
  const auto g = lambda_grid(3, 2.0);
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_NEAR(g[1], 0.1, 1e-15);
  EXPECT_NEAR(g[2], 0.01, 1e-16);
  EXPECT_EQ(lambda_grid(1, 2.0), std::vector<double>{1.0});
  EXPECT_THROW(lambda_grid(0), Error);
}

TEST(KktReport, IdentityIsExact) {
  const auto est = scio_estimate(SymMatrix::identity(4), 0.3);
  const auto rep = kkt_report(SymMatrix::identity(4), est);
  EXPECT_LE(rep.max_dual, 1e-15);
  EXPECT_LE(rep.max_stationarity, 1e-15);
}

TEST(KktReport, PerturbationIsFlagged) {
  const SymMatrix s{{1, 0.5}, {0.5, 1}};
  auto est = scio_estimate(s, 0.1);
  EXPECT_TRUE(kkt_report(s, est).within(1e-10));
  est.columns[0].beta[0] += 0.1;
  const auto rep = kkt_report(s, est);
  // Gradient moves by 0.1·Σ̂(:,0) = (0.1, 0.05); coordinate 0 is active.
  EXPECT_NEAR(rep.columns[0].stationarity, 0.1, 1e-10);
  EXPECT_NEAR(rep.max_stationarity, 0.1, 1e-10);
  EXPECT_FALSE(rep.within(1e-6));
}

TEST(Gemini, IdentityFactorsSeparate) {
  CovarianceEstimate a{SymMatrix::identity(3), EstimatorKind::GeminiA, {}, false, {}};
  CovarianceEstimate b{SymMatrix::identity(2), EstimatorKind::GeminiB, {}, false, {}};
  const auto g = gemini_precision(a, b, 0.1, 0.2);
  ASSERT_TRUE(g.assembled.has_value());
  EXPECT_NEAR(matrix_norm(*g.assembled - (0.9 * 0.8) * SymMatrix::identity(6), NormKind::ElementwiseInf), 0.0, 1e-14);
}

TEST(Gemini, HugePenaltyZeroesProduct) {
  CovarianceEstimate a{correlation_of_inverse(make_toeplitz_precision(4, 0.5)), EstimatorKind::GeminiA, {}, false, {}};
  CovarianceEstimate b{SymMatrix::identity(2), EstimatorKind::GeminiB, {}, false, {}};
  const auto g = gemini_precision(a, b, 1e6, 0.2);
  EXPECT_EQ(matrix_norm(g.a.omega_tilde, NormKind::ElementwiseInf), 0.0);
  EXPECT_EQ(matrix_norm(*g.assembled, NormKind::ElementwiseInf), 0.0);
}

TEST(Gemini, AssemblySkippedAboveCap) {
  CovarianceEstimate a{SymMatrix::identity(5), EstimatorKind::GeminiA, {}, false, {}};
  CovarianceEstimate b{SymMatrix::identity(5), EstimatorKind::GeminiB, {}, false, {}};
  const auto g = gemini_precision(a, b, 0.1, 0.1, 20);
  EXPECT_FALSE(g.assembled.has_value());
  EXPECT_THROW(g.product.assemble(20), Error);
}

TEST(KroneckerPrecision, FactorizedMatchesAssembled) {
  const KroneckerPrecision k(testing::random_spd(4, 1), testing::random_spd(3, 2));
  const SymMatrix dense = k.assemble();
  std::vector<double> v(12);
  for (std::size_t i = 0; i < 12; ++i) v[i] = std::cos(static_cast<double>(i));
  const auto fast = k.apply(v);
  const auto slow = dense * std::span<const double>(v);
  for (std::size_t i = 0; i < 12; ++i) {
    EXPECT_NEAR(fast[i], slow[i], 1e-12);
    for (std::size_t j = 0; j < 12; ++j) EXPECT_EQ(k(i, j), dense(i, j));
  }
  EXPECT_NEAR(k.spectral_norm(), matrix_norm(dense, NormKind::Spectral), 1e-10);
}

}  // namespace
}  // namespace wsp
