#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "support/oracles.hpp"
#include "wsp/covariance.hpp"
#include "wsp/error.hpp"
#include "wsp/linalg.hpp"
#include "wsp/random.hpp"
#include "wsp/simulate.hpp"

namespace wsp {
namespace {

TEST(SampleCovariance, IdenticalRowsGiveZero) {
  DataMatrix x{{1.5, -2.0, 3.0}, {1.5, -2.0, 3.0}};
  const auto est = sample_covariance(x);
  EXPECT_EQ(matrix_norm(est.matrix, NormKind::ElementwiseInf), 0.0);
  EXPECT_EQ(est.kind, EstimatorKind::Sample);
  EXPECT_FALSE(est.projected);
}

TEST(SampleCovariance, DividesByN) {
  const auto est = sample_covariance(DataMatrix{{0, 0}, {2, 0}});
  EXPECT_DOUBLE_EQ(est.matrix(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(est.matrix(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(est.matrix(1, 1), 0.0);
}

TEST(SampleCovariance, RejectsSingleRow) { EXPECT_THROW(sample_covariance(DataMatrix{{1, 2}}), Error); }

TEST(SampleCovariance, MonteCarloToeplitzMedianError) {
  const SymMatrix sigma = invert_spd(make_toeplitz_precision(10, 0.5));
  std::vector<double> errs;
  for (std::uint64_t r = 0; r < 20; ++r) {
    const auto x = sample_gaussian(200, sigma, stream_seed(1, r));
    errs.push_back(matrix_norm(sample_covariance(x).matrix - sigma, NormKind::ElementwiseInf));
  }
  EXPECT_LT(testing::median(errs), 0.35);
}

TEST(SampleCovariance, OutputIsPsd) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    // n < p makes the estimate singular; the smallest eigenvalue is ~0.
    const auto x = sample_gaussian(6, SymMatrix::identity(9), seed);
    EXPECT_GE(min_eigenvalue(sample_covariance(x).matrix), -1e-10);
  }
}

TEST(HuberPsi, Clamp) {
  EXPECT_EQ(huber_psi(5, 2), 2);
  EXPECT_EQ(huber_psi(-5, 2), -2);
  EXPECT_EQ(huber_psi(0.3, 2), 0.3);
}

TEST(HuberLocation, Examples) {
  const double ones[] = {1, 1, 1};
  EXPECT_NEAR(huber_location(ones, 0.5), 1.0, 1e-12);
  EXPECT_NEAR(huber_location(ones, 50.0), 1.0, 1e-10);
  const double sym[] = {-1, 1};
  EXPECT_NEAR(huber_location(sym, 10.0), 0.0, 1e-12);
  // Two points pull with −μ each, the clipped outlier pushes with +1.
  const double outlier[] = {0, 0, 100};
  EXPECT_NEAR(huber_location(outlier, 1.0), 0.5, 1e-11);
}

TEST(HuberLocation, FlatIntervalMidpoint) {
  // ψ-sum vanishes for μ in [1, 9]: both residuals are clipped.
  const double x[] = {0, 10};
  EXPECT_NEAR(huber_location(x, 1.0), 5.0, 1e-10);
}

TEST(HuberLocation, EstimatingEquationResidual) {
  Rng rng(42);
  std::vector<double> x(301);
  for (double& v : x) v = rng.normal() * 3.0 + (rng.uniform() < 0.1 ? 40.0 : 0.0);
  for (double h : {0.5, 2.0, 10.0}) {
    const double mu = huber_location(x, h);
    double sum = 0.0;
    for (double v : x) sum += huber_psi(v - mu, h);
    EXPECT_LE(std::abs(sum), 1e-10 * static_cast<double>(x.size())) << h;
  }
}

TEST(HuberCovariance, DegenerateSampleProjectsToFloor) {
  DataMatrix x(5, 3);
  for (std::size_t k = 0; k < 5; ++k) {
    x(k, 0) = 1.0;
    x(k, 1) = -2.0;
    x(k, 2) = 0.5;
  }
  const auto est = huber_covariance(x, 2.0, 1e-3);
  EXPECT_TRUE(est.projected);
  ASSERT_TRUE(est.huber_H.has_value());
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(est.matrix(i, j), i == j ? 1e-3 : 0.0, 1e-6);
}

TEST(HuberCovariance, LargeTruncationMatchesPlugIn) {
  const auto x = sample_gaussian(150, invert_spd(make_toeplitz_precision(6, 0.5)), 9);
  const double h = huber_truncation(x.rows(), x.cols(), 1e6);
  const SymMatrix raw = huber_raw_covariance(x, h);
  const std::size_t n = x.rows();
  std::vector<double> mean(6, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < 6; ++j) mean[j] += x(k, j) / static_cast<double>(n);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      double m = 0.0;
      for (std::size_t k = 0; k < n; ++k) m += x(k, i) * x(k, j);
      m /= static_cast<double>(n);
      EXPECT_NEAR(raw(i, j), m - mean[i] * mean[j], 1e-8);
    }
}

TEST(HuberCovariance, TruncationLevel) {
  EXPECT_DOUBLE_EQ(huber_truncation(200, 50, 2.0), 2.0 * std::sqrt(200.0 / std::log(50.0)));
  EXPECT_THROW(huber_truncation(200, 1, 2.0), Error);
}

TEST(HuberCovariance, BeatsSampleOnHeavyTails) {
  const std::size_t p = 50;
  const SymMatrix sigma = invert_spd(make_toeplitz_precision(p, 0.5));
  int wins = 0;
  for (std::uint64_t r = 0; r < 20; ++r) {
    const auto x = sample_mvt(200, sigma, 3.5, stream_seed(3, r));
    const double huber = matrix_norm(huber_covariance(x, 2.0, 1e-3).matrix - sigma, NormKind::ElementwiseInf);
    const double sample = matrix_norm(sample_covariance(x).matrix - sigma, NormKind::ElementwiseInf);
    if (huber <= sample) ++wins;
  }
  EXPECT_GE(wins, 14);
}

TEST(MidRanks, Ties) {
  const double x[] = {3.0, 1.0, 3.0, 2.0};
  const auto r = mid_ranks(x);
  EXPECT_EQ(r, (std::vector<double>{3.5, 1.0, 3.5, 2.0}));
}

TEST(RankCorrelation, PerfectConcordanceSpearman) {
  const DataMatrix x{{1, 1}, {2, 2}, {3, 3}};
  const SymMatrix raw = rank_correlation_raw(x, RankMethod::Spearman);
  EXPECT_NEAR(raw(0, 1), 1.0, 1e-15);
  EXPECT_EQ(raw(0, 0), 1.0);
}

TEST(RankCorrelation, PerfectDiscordanceKendall) {
  const DataMatrix x{{1, 3}, {2, 2}, {3, 1}};
  const SymMatrix raw = rank_correlation_raw(x, RankMethod::Kendall);
  EXPECT_DOUBLE_EQ(raw(0, 1), -1.0);
}

TEST(RankCorrelation, ConstantColumnIsDegenerate) {
  const DataMatrix x{{1, 5}, {2, 5}, {3, 5}};
  for (auto method : {RankMethod::Spearman, RankMethod::Kendall}) {
    try {
      rank_correlation_raw(x, method);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::DegenerateColumn);
    }
  }
}

TEST(RankCorrelation, MonotoneInvarianceIsBitExact) {
  const SymMatrix sigma = correlation_of_inverse(make_toeplitz_precision(8, 0.5));
  const auto x = sample_gaussian(120, sigma, 5);
  DataMatrix y = x;
  for (std::size_t k = 0; k < y.rows(); ++k) {
    y(k, 0) = std::exp(y(k, 0));
    y(k, 3) = y(k, 3) * y(k, 3) * y(k, 3) + 2.0 * y(k, 3);
    y(k, 5) = std::atan(y(k, 5));
  }
  for (auto method : {RankMethod::Spearman, RankMethod::Kendall}) {
    EXPECT_EQ(rank_correlation_raw(x, method), rank_correlation_raw(y, method));
    EXPECT_EQ(rank_correlation_matrix(x, method).matrix, rank_correlation_matrix(y, method).matrix);
  }
}

TEST(RankCorrelation, KendallMatchesBruteForce) {
  const auto x = sample_gaussian(40, correlation_of_inverse(make_toeplitz_precision(4, 0.6)), 8);
  const SymMatrix raw = rank_correlation_raw(x, RankMethod::Kendall);
  const double n = 40.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 40; ++k)
        for (std::size_t l = k + 1; l < 40; ++l) {
          const double prod = (x(k, i) - x(l, i)) * (x(k, j) - x(l, j));
          s += prod > 0 ? 1.0 : (prod < 0 ? -1.0 : 0.0);
        }
      const double tau = 2.0 / (n * (n - 1.0)) * s;
      EXPECT_NEAR(raw(i, j), std::sin(std::numbers::pi / 2.0 * tau), 1e-14);
    }
}

TEST(PsdProject, FeasibleInputUnchanged) {
  const SymMatrix id = SymMatrix::identity(3);
  const auto res = psd_project_detailed(id, 0.01);
  EXPECT_TRUE(res.already_feasible);
  EXPECT_EQ(res.matrix, id);
}

TEST(PsdProject, TwoByTwoClosedForm) {
  const SymMatrix s{{1, 1.2}, {1.2, 1}};
  const auto res = psd_project_detailed(s, 0.01);
  EXPECT_NEAR(res.objective, 0.105, 1e-5);
  EXPECT_NEAR(testing::sup_norm_projection_oracle(s, 0.01), 0.105, 1e-8);
  EXPECT_GE(min_eigenvalue(res.matrix), 0.01 - 1e-8);
  // The symmetric equal-diagonal optimum.
  EXPECT_NEAR(res.matrix(0, 0), 1.105, 1e-4);
  EXPECT_NEAR(res.matrix(0, 1), 1.095, 1e-4);
}

TEST(PsdProject, OneByOneClamp) {
  const auto res = psd_project_detailed(SymMatrix{{-1.0}}, 0.5);
  EXPECT_NEAR(res.matrix(0, 0), 0.5, 1e-6);
  EXPECT_NEAR(res.objective, 1.5, 1e-6);
}

TEST(PsdProject, IterationCapThrows) {
  AdmmOptions opts;
  opts.max_iterations = 1;
  try {
    psd_project(testing::random_symmetric(6, 2), 1e-3, opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConvergenceFailure);
  }
}

TEST(PsdProject, NeverWorseThanClipBaseline) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const SymMatrix s = testing::random_symmetric(2 + seed % 9, seed);
    const double eps = 1e-3;
    const auto res = psd_project_detailed(s, eps);
    const double clip = matrix_norm(eigenvalue_clip(s, eps) - s, NormKind::ElementwiseInf);
    EXPECT_LE(res.objective, clip + 1e-6) << seed;
    EXPECT_GE(min_eigenvalue(res.matrix), eps - 1e-8) << seed;
  }
}

TEST(L1Ball, ProjectionProperties) {
  const std::vector<double> v{3.0, -1.0, 0.5};
  const auto inside = project_l1_ball(v, 10.0);
  EXPECT_EQ(inside, v);
  const auto out = project_l1_ball(v, 2.0);
  // θ = 1: (2, 0, 0).
  EXPECT_NEAR(out[0], 2.0, 1e-15);
  EXPECT_NEAR(out[1], 0.0, 1e-15);
  EXPECT_NEAR(out[2], 0.0, 1e-15);
  const auto out2 = project_l1_ball(v, 3.5);
  // θ = 1/3 keeps all three coordinates: (8/3, -2/3, 1/6).
  EXPECT_NEAR(out2[0], 8.0 / 3.0, 1e-15);
  EXPECT_NEAR(out2[1], -2.0 / 3.0, 1e-15);
  EXPECT_NEAR(out2[2], 1.0 / 6.0, 1e-15);
}

TEST(Gemini, OrthogonalColumnsGiveIdentity) {
  const Matrix x{{1, 1, 0}, {1, -1, 0}, {0, 0, 3}, {0, 0, 0.5}};
  const std::vector<Matrix> samples{x};
  const auto [a, b] = gemini_covariances(samples);
  EXPECT_EQ(a.matrix, SymMatrix::identity(3));
  EXPECT_EQ(a.kind, EstimatorKind::GeminiA);
  EXPECT_EQ(b.kind, EstimatorKind::GeminiB);
}

TEST(Gemini, AlignedColumns) {
  const Matrix x{{1, 2}, {-1, -2}, {3, 6}};
  const std::vector<Matrix> samples{x};
  // Rows are parallel too, so B is all ones; A's off-diagonal is 1.
  const auto [a, b] = gemini_covariances(samples);
  EXPECT_NEAR(a.matrix(0, 1), 1.0, 1e-15);
  EXPECT_EQ(a.matrix(0, 0), 1.0);
  EXPECT_NEAR(b.matrix(0, 1), -1.0, 1e-15);
}

TEST(Gemini, ZeroAxisIsDegenerate) {
  const Matrix x{{1, 0}, {2, 0}};
  const std::vector<Matrix> samples{x};
  try {
    gemini_covariances(samples);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateAxis);
  }
}

TEST(Gemini, MonteCarloIdentityFactors) {
  const auto samples = sample_matrix_normal(50, SymMatrix::identity(4), SymMatrix::identity(3), 11);
  const auto [a, b] = gemini_covariances(samples);
  EXPECT_LE(matrix_norm(a.matrix - SymMatrix::identity(4), NormKind::ElementwiseInf), 0.25);
  for (const auto* est : {&a, &b}) {
    for (std::size_t i = 0; i < est->matrix.dim(); ++i) {
      EXPECT_EQ(est->matrix(i, i), 1.0);
      for (std::size_t j = 0; j < est->matrix.dim(); ++j) EXPECT_LE(std::abs(est->matrix(i, j)), 1.0 + 1e-12);
    }
  }
}

}  // namespace
}  // namespace wsp
