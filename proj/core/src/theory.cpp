#include "wsp/theory.hpp"

#include <algorithm>
#include <cmath>

#include "wsp/error.hpp"
#include "wsp/simulate.hpp"

namespace wsp {

double ErrorReport::get(NormKind kind) const {
  switch (kind) {
    case NormKind::ElementwiseInf: return elementwise_inf;
    case NormKind::Spectral: return spectral;
    case NormKind::L1: return l1;
    case NormKind::Frobenius: return frobenius;
    case NormKind::ScaledFrobenius: return scaled_frobenius;
  }
  return 0.0;
}

ErrorReport error_report(const Matrix& estimate, const Matrix& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "theory.error_report", "estimate and truth differ in shape");
  }
  const Matrix d = estimate - truth;
  return ErrorReport{matrix_norm(d, NormKind::ElementwiseInf), matrix_norm(d, NormKind::Spectral),
                     matrix_norm(d, NormKind::L1), matrix_norm(d, NormKind::Frobenius),
                     matrix_norm(d, NormKind::ScaledFrobenius)};
}

ErrorReport error_report(const SymMatrix& estimate, const SymMatrix& truth) {
  return error_report(estimate.matrix(), truth.matrix());
}

ErrorReport kronecker_error_report(const KroneckerPrecision& estimate, const KroneckerPrecision& truth) {
  const std::size_t n = estimate.dim();
  if (truth.dim() != n) {
    throw Error(ErrorCode::DimensionMismatch, "theory.kronecker_error_report", "estimate and truth differ in shape");
  }
  ErrorReport r;
  double sq = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = std::abs(estimate(i, j) - truth(i, j));
      r.elementwise_inf = std::max(r.elementwise_inf, d);
      col += d;
      sq += d * d;
    }
    r.l1 = std::max(r.l1, col);
  }
  r.frobenius = std::sqrt(sq);
  r.scaled_frobenius = n ? sq / static_cast<double>(n) : 0.0;
  r.spectral = symmetric_operator_norm(n, [&](std::span<const double> v) {
    auto out = estimate.apply(v);
    const auto t = truth.apply(v);
    for (std::size_t i = 0; i < n; ++i) out[i] -= t[i];
    return out;
  });
  return r;
}

namespace {

Inequality compare(double lhs, double rhs) { return {lhs, rhs, lhs <= rhs + kBoundSlack}; }

}  // namespace

BoundCheck evaluate_bounds(const SymMatrix& truth_omega, const PrecisionEstimate& est,
                           const SymMatrix& sigma_hat, const SymMatrix& sigma_true, double q) {
  const std::size_t p = truth_omega.dim();
  if (sigma_hat.dim() != p || sigma_true.dim() != p || est.columns.size() != p) {
    throw Error(ErrorCode::DimensionMismatch, "theory.check_bounds", "inconsistent dimensions");
  }
  const double lambda = est.lambda;
  const auto sparsity = sparsity_summary(truth_omega, q);
  BoundCheck bc;
  bc.lambda = lambda;
  bc.q = q;
  bc.s_p = sparsity.s_p;
  bc.m_p = sparsity.m_p;
  const double m = sparsity.m_p;
  bc.sigma_error_inf = matrix_norm(sigma_hat - sigma_true, NormKind::ElementwiseInf);

  bc.noise_condition = {3.0 * m * bc.sigma_error_inf, lambda, 3.0 * m * bc.sigma_error_inf <= lambda};
  const double radius = std::pow(m, -q) * std::pow(lambda, 1.0 - q) * bc.s_p;
  bc.sparsity_condition = {radius, 0.5, radius <= 0.5};
  bc.hypotheses_hold = bc.noise_condition.satisfied && bc.sparsity_condition.satisfied;

  bc.solver_converged = est.converged();
  for (const auto& c : est.columns) bc.max_kkt_residual = std::max(bc.max_kkt_residual, c.kkt_residual());

  double worst_l1 = -1.0;
  double worst_inf = -1.0;
  for (std::size_t i = 0; i < p; ++i) {
    double l1 = 0.0;
    double inf = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double d = std::abs(est.columns[i].beta[j] - truth_omega(j, i));
      l1 += d;
      inf = std::max(inf, d);
    }
    if (l1 > worst_l1) {
      worst_l1 = l1;
      bc.worst_column_l1 = i;
    }
    if (inf > worst_inf) {
      worst_inf = inf;
      bc.worst_column_inf = i;
    }
  }
  bc.column_l1 = compare(worst_l1, 16.0 * std::pow(m, 1.0 - q) * bc.s_p * std::pow(lambda, 1.0 - q));
  bc.column_inf = compare(worst_inf, 4.0 * m * lambda);

  const auto err = error_report(est.omega_tilde, truth_omega);
  bc.matrix_inf = compare(err.elementwise_inf, 4.0 * m * lambda);
  bc.matrix_l1 = compare(err.l1, 66.0 * std::pow(lambda * m, 1.0 - q) * bc.s_p);
  return bc;
}

BoundCheck check_bounds(const SymMatrix& truth_omega, const SymMatrix& sigma_hat,
                        const SymMatrix& sigma_true, double lambda, double q,
                        const SolverOptions& opts) {
  if (sigma_hat.dim() != truth_omega.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "theory.check_bounds", "inconsistent dimensions");
  }
  return evaluate_bounds(truth_omega, scio_estimate(sigma_hat, lambda, nullptr, opts), sigma_hat,
                         sigma_true, q);
}

OracleChoice oracle_tune(const LambdaPath& path, const SymMatrix& truth, NormKind kind) {
  if (path.estimates.empty()) throw Error(ErrorCode::EmptyPath, "theory.oracle_tune", "path has no estimates");
  std::size_t best = 0;
  double best_err = 0.0;
  for (std::size_t k = 0; k < path.estimates.size(); ++k) {
    const auto& est = path.estimates[k];
    if (est.omega_tilde.dim() != truth.dim()) {
      throw Error(ErrorCode::DimensionMismatch, "theory.oracle_tune", "estimate and truth differ in shape");
    }
    const double e = matrix_norm(est.omega_tilde - truth, kind);
    if (k == 0 || e < best_err || (e == best_err && est.lambda > path.estimates[best].lambda)) {
      best = k;
      best_err = e;
    }
  }
  return {best, path.estimates[best].lambda, error_report(path.estimates[best].omega_tilde, truth)};
}

}  // namespace wsp
