#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "wsp/matrix.hpp"

namespace wsp {

/// n×p observations, one row per sample.
using DataMatrix = Matrix;

enum class EstimatorKind { Sample, Huber, Spearman, Kendall, GeminiA, GeminiB };

std::string_view to_string(EstimatorKind kind);
std::optional<EstimatorKind> parse_estimator_kind(std::string_view name);

struct CovarianceEstimate {
  SymMatrix matrix;
  EstimatorKind kind = EstimatorKind::Sample;
  std::optional<double> huber_H;
  bool projected = false;
  std::optional<double> epsilon;
};

inline constexpr double kDefaultHuberK = 2.0;
inline constexpr double kDefaultProjectionFloor = 1e-3;

/// (1/n) Σ (X_k − X̄)(X_k − X̄)ᵀ.
CovarianceEstimate sample_covariance(const DataMatrix& data);

/// Clamp of x to [−H, H].
constexpr double huber_psi(double x, double h) { return x > h ? h : (x < -h ? -h : x); }

/// Root μ of Σ_k ψ_H(x_k − μ) = 0 by bisection on [min x − H, max x + H].
/// When the estimating function vanishes on an interval the midpoint of
/// that interval is returned.
double huber_location(std::span<const double> x, double h);

/// Truncation level H = K (n / log p)^{1/2}.
double huber_truncation(std::size_t n, std::size_t p, double k_const);

/// Entrywise Huber second-moment estimate before projection:
/// σ̃_ij = huber_location({X_ki X_kj}_k, H) − μ̃_i μ̃_j.
SymMatrix huber_raw_covariance(const DataMatrix& data, double h);

/// Huber pilot, projected onto {Σ ⪰ εI}.
CovarianceEstimate huber_covariance(const DataMatrix& data, double k_const = kDefaultHuberK,
                                    double epsilon = kDefaultProjectionFloor);

enum class RankMethod { Spearman, Kendall };

/// Ranks of `x` (1-based), with tied values sharing their mean rank.
std::vector<double> mid_ranks(std::span<const double> x);

/// Sine-transformed rank correlation (unit diagonal) before projection.
SymMatrix rank_correlation_raw(const DataMatrix& data, RankMethod method);

CovarianceEstimate rank_correlation_matrix(const DataMatrix& data, RankMethod method,
                                           double epsilon = kDefaultProjectionFloor);

struct AdmmOptions {
  double penalty = 1.0;
  double tolerance = 1e-6;
  int max_iterations = 2000;
  /// Stop once the best objective is within this of the dual lower bound.
  double gap_tolerance = 1e-5;
  /// Rebalance the penalty from the primal/dual residual ratio.
  bool adaptive = true;
};

struct PsdProjection {
  SymMatrix matrix;
  /// ‖matrix − input‖_∞ (elementwise).
  double objective = 0.0;
  int iterations = 0;
  bool already_feasible = false;
};

/// argmin over Σ ⪰ εI of the elementwise sup-norm distance ‖Σ − S̃‖_∞.
///
/// ADMM on the split (Σ, Z): Z takes the eigenvalue clip onto {Z ⪰ εI},
/// Σ takes the proximal map of the sup-norm distance, computed through a
/// Euclidean projection onto an ℓ1 ball. Stops on small primal and dual
/// residuals or on a certified duality gap; returns the best iterate, so
/// the objective never exceeds the eigenvalue-clip baseline. Throws
/// ConvergenceFailure when the iteration cap is reached.
PsdProjection psd_project_detailed(const SymMatrix& s_tilde, double epsilon,
                                   const AdmmOptions& opts = {});

SymMatrix psd_project(const SymMatrix& s_tilde, double epsilon, const AdmmOptions& opts = {});

/// V diag(max(λ, ε)) Vᵀ; always feasible, used as a reference point.
SymMatrix eigenvalue_clip(const SymMatrix& s, double epsilon);

/// Euclidean projection of v onto {x : |x|₁ ≤ radius}.
std::vector<double> project_l1_ball(std::span<const double> v, double radius);

/// Normalized Gram pilots for f×m matrix samples: first is the m×m column
/// factor A, second the f×f row factor B. No centering.
std::pair<CovarianceEstimate, CovarianceEstimate> gemini_covariances(
    std::span<const Matrix> samples);

}  // namespace wsp
