#pragma once

#include <cstddef>

#include "wsp/linalg.hpp"
#include "wsp/matrix.hpp"
#include "wsp/scio.hpp"

namespace wsp {

/// Norms of (estimate − truth).
struct ErrorReport {
  double elementwise_inf = 0.0;
  double spectral = 0.0;
  double l1 = 0.0;
  double frobenius = 0.0;
  double scaled_frobenius = 0.0;

  double get(NormKind kind) const;
};

ErrorReport error_report(const Matrix& estimate, const Matrix& truth);
ErrorReport error_report(const SymMatrix& estimate, const SymMatrix& truth);

/// Same norms for two Kronecker-structured matrices without assembling
/// either: entrywise norms stream over the entries, and the spectral norm
/// of the symmetric difference comes from symmetric_operator_norm.
ErrorReport kronecker_error_report(const KroneckerPrecision& estimate, const KroneckerPrecision& truth);

/// One side-by-side inequality lhs ≤ rhs.
struct Inequality {
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
};

/// Deterministic error bounds for the column-wise and symmetrized solutions:
///   column:  |β̂_i − β*_i|₁ ≤ 16 M^{1−q} s_p λ^{1−q},  |β̂_i − β*_i|∞ ≤ 4 M λ
///   matrix:  ‖Ω̃ − Ω‖∞ ≤ 4 M λ,  ‖Ω̃ − Ω‖_L1 ≤ 66 (λ M)^{1−q} s_p
/// valid when λ ≥ 3 M ‖Σ̂ − Σ‖∞ and M^{−q} λ^{1−q} s_p ≤ ½, with
/// M = ‖Ω‖_L1 and s_p the ℓq column radius of Ω.
struct BoundCheck {
  double lambda = 0.0;
  double q = 0.0;
  double s_p = 0.0;
  double m_p = 0.0;
  double sigma_error_inf = 0.0;

  Inequality noise_condition;     // 3 M ‖Σ̂ − Σ‖∞ ≤ λ
  Inequality sparsity_condition;  // M^{−q} λ^{1−q} s_p ≤ ½
  bool hypotheses_hold = false;

  Inequality column_l1;   // worst column
  Inequality column_inf;  // worst column
  std::size_t worst_column_l1 = 0;
  std::size_t worst_column_inf = 0;
  Inequality matrix_inf;
  Inequality matrix_l1;

  bool solver_converged = false;
  double max_kkt_residual = 0.0;

  bool all_satisfied() const {
    return column_l1.satisfied && column_inf.satisfied && matrix_inf.satisfied && matrix_l1.satisfied;
  }
};

/// Slack granted to each inequality, matching the solver's KKT tolerance.
inline constexpr double kBoundSlack = 1e-6;

/// Evaluates the hypotheses and inequalities for an existing estimate.
BoundCheck evaluate_bounds(const SymMatrix& truth_omega, const PrecisionEstimate& est,
                           const SymMatrix& sigma_hat, const SymMatrix& sigma_true, double q);

/// Solves SCIO on sigma_hat at lambda and evaluates both hypotheses and all
/// four inequalities against truth_omega.
BoundCheck check_bounds(const SymMatrix& truth_omega, const SymMatrix& sigma_hat,
                        const SymMatrix& sigma_true, double lambda, double q,
                        const SolverOptions& opts = {});

struct OracleChoice {
  std::size_t index = 0;
  double lambda = 0.0;
  ErrorReport errors;
};

/// Grid point minimizing the chosen norm of Ω̃ − truth; ties go to the larger λ.
OracleChoice oracle_tune(const LambdaPath& path, const SymMatrix& truth, NormKind kind);

}  // namespace wsp
