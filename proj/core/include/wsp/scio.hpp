#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wsp/covariance.hpp"
#include "wsp/linalg.hpp"
#include "wsp/matrix.hpp"

namespace wsp {

struct SolverOptions {
  int max_sweeps = 10'000;
  /// Stop when the largest coordinate move in a full sweep is at most
  /// change_tolerance · max(1, |β|∞) ...
  double change_tolerance = 1e-9;
  /// ... and the KKT residual is at most this.
  double kkt_tolerance = 1e-7;
  /// Re-solve the active-set linear system exactly after convergence and
  /// keep it if it is sign-consistent and has a smaller KKT residual.
  bool polish = true;
  bool record_objective = false;
};

struct KktViolation {
  /// max_j (|(Σ̂β)_j − e_ij| − λ)_+
  double dual = 0.0;
  /// max over β_j ≠ 0 of |(Σ̂β)_j − e_ij + λ sign β_j|
  double stationarity = 0.0;

  double worst() const { return dual > stationarity ? dual : stationarity; }
};

/// Solution of min_β ½ βᵀΣ̂β − e_iᵀβ + λ|β|₁ for one column.
struct ColumnSolution {
  std::size_t index = 0;
  std::vector<double> beta;
  double lambda = 0.0;
  KktViolation kkt;
  int sweeps = 0;
  bool converged = false;
  /// Objective after each full sweep; filled when record_objective is set.
  std::vector<double> objective_trace;

  double kkt_residual() const { return kkt.worst(); }
};

struct PrecisionEstimate {
  std::vector<ColumnSolution> columns;
  SymMatrix omega_tilde;
  double lambda = 0.0;

  bool converged() const;
  /// Unsymmetrized stack Ω̂ = (β̂_1, …, β̂_p).
  Matrix omega_hat() const;
};

struct LambdaPath {
  std::vector<double> grid;
  std::vector<PrecisionEstimate> estimates;
};

/// ½ βᵀΣ̂β − β_i + λ|β|₁.
double scio_objective(const SymMatrix& sigma_hat, std::size_t i, std::span<const double> beta,
                      double lambda);

KktViolation column_kkt(const SymMatrix& sigma_hat, std::size_t i, std::span<const double> beta,
                        double lambda);

/// Cyclic coordinate descent with an active-set inner loop. A column that
/// hits the sweep cap is returned with converged = false.
ColumnSolution scio_column(const SymMatrix& sigma_hat, std::size_t i, double lambda,
                           std::optional<std::span<const double>> warm_start = std::nullopt,
                           const SolverOptions& opts = {});

/// ω̃_ij = ω̃_ji = the smaller-magnitude of Ω̂(i,j) and Ω̂(j,i); ties keep Ω̂(i,j) for i < j.
SymMatrix symmetrize(const Matrix& omega_hat);

PrecisionEstimate scio_estimate(const SymMatrix& sigma_hat, double lambda,
                                const PrecisionEstimate* warm = nullptr,
                                const SolverOptions& opts = {});

/// Warm-started solves along a strictly decreasing grid.
LambdaPath scio_path(const SymMatrix& sigma_hat, std::span<const double> grid,
                     const SolverOptions& opts = {});

/// `count` log-spaced penalties from lambda_max down `decades` decades.
std::vector<double> lambda_grid(std::size_t count = 30, double decades = 2.0,
                                double lambda_max = 1.0);

struct KktReport {
  std::vector<KktViolation> columns;
  double max_dual = 0.0;
  double max_stationarity = 0.0;

  bool within(double tol) const { return max_dual <= tol && max_stationarity <= tol; }
};

/// Recomputes the KKT residuals of every column from scratch.
KktReport kkt_report(const SymMatrix& sigma_hat, const PrecisionEstimate& est);

/// Ω̃_A ⊗ Ω̃_B held by its factors. Row/column index c·f + r addresses
/// entry (r, c) of an f×m matrix sample (column-stacked vec).
class KroneckerPrecision {
 public:
  KroneckerPrecision(SymMatrix a, SymMatrix b) : a_(std::move(a)), b_(std::move(b)) {}

  std::size_t dim() const { return a_.dim() * b_.dim(); }
  double operator()(std::size_t row, std::size_t col) const;
  /// (A ⊗ B) v computed as vec(B X A) without assembling the product.
  std::vector<double> apply(std::span<const double> v) const;
  double spectral_norm() const;
  SymMatrix assemble(std::size_t cap = kDefaultKroneckerCap) const;

  const SymMatrix& a() const { return a_; }
  const SymMatrix& b() const { return b_; }

 private:
  SymMatrix a_;
  SymMatrix b_;
};

struct GeminiPrecision {
  PrecisionEstimate a;
  PrecisionEstimate b;
  KroneckerPrecision product;
  /// Dense Ω̃_A ⊗ Ω̃_B when it fits under the dimension cap.
  std::optional<SymMatrix> assembled;
};

GeminiPrecision gemini_precision(const CovarianceEstimate& sigma_a, const CovarianceEstimate& sigma_b,
                                 double lambda_a, double lambda_b,
                                 std::size_t cap = kDefaultKroneckerCap,
                                 const SolverOptions& opts = {});

}  // namespace wsp
