#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "wsp/matrix.hpp"

namespace wsp {

/// Eigen-decomposition of a symmetric matrix.
/// `eigenvalues` ascend; column k of `eigenvectors` pairs with eigenvalue k.
struct EigenDecomp {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;

  /// V diag(f(λ)) Vᵀ.
  template <typename F>
  SymMatrix recompose(F&& f) const;
  SymMatrix recompose() const;
};

/// Lower-triangular L with L Lᵀ = s. Throws NotPositiveDefinite on a pivot ≤ 0.
Matrix cholesky(const SymMatrix& s);

/// Solve L Lᵀ x = b given the Cholesky factor L.
std::vector<double> cholesky_solve(const Matrix& lower, std::span<const double> b);

struct JacobiOptions {
  int max_sweeps = 100;
  double off_tolerance = 1e-12;
};

/// Cyclic Jacobi eigensolver. Throws ConvergenceFailure past the sweep cap.
EigenDecomp sym_eigen(const SymMatrix& s, const JacobiOptions& opts = {});

/// Jacobi started from a prior orthonormal basis: diagonalizes Vᵀ s V and
/// composes the rotations onto V. Cheap when s is close to diagonal in V.
EigenDecomp sym_eigen_from(const SymMatrix& s, const Matrix& basis, const JacobiOptions& opts = {});

double min_eigenvalue(const SymMatrix& s);

enum class NormKind { ElementwiseInf, L1, Spectral, Frobenius, ScaledFrobenius };

/// Matrix norms:
///   ElementwiseInf  max |a_ij|
///   L1              max column absolute sum
///   Spectral        largest singular value
///   Frobenius       sqrt(sum a_ij^2)
///   ScaledFrobenius Frobenius^2 / rows
double matrix_norm(const Matrix& a, NormKind kind);
double matrix_norm(const SymMatrix& a, NormKind kind);

/// Jacobi is used for the spectral norm up to this dimension; above it the
/// norm comes from a tridiagonal reduction with Sturm bisection.
inline constexpr std::size_t kDenseSpectralLimit = 64;

using LinearOperator = std::function<std::vector<double>(std::span<const double>)>;

/// Largest |eigenvalue| of a symmetric operator known only through its
/// action. Lanczos with full reorthogonalization from a fixed start; stops
/// when the extreme Ritz value has grown by at most tolerance (relative) over
/// the last ten steps, on breakdown (the Krylov space is invariant), or after
/// `dim` steps.
double symmetric_operator_norm(std::size_t dim, const LinearOperator& apply, double tolerance = 1e-11);

inline constexpr std::size_t kDefaultKroneckerCap = 10'000;

/// Kronecker product; throws DimensionOverflow if either result dimension
/// exceeds `cap`.
Matrix kronecker(const Matrix& a, const Matrix& b, std::size_t cap = kDefaultKroneckerCap);
SymMatrix kronecker(const SymMatrix& a, const SymMatrix& b,
                    std::size_t cap = kDefaultKroneckerCap);

/// Inverse of an SPD matrix through its Cholesky factor, symmetrized.
SymMatrix invert_spd(const SymMatrix& s);

template <typename F>
SymMatrix EigenDecomp::recompose(F&& f) const {
  const std::size_t n = eigenvalues.size();
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = f(eigenvalues[k]);
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += eigenvectors(i, k) * w[k] * eigenvectors(j, k);
      out(i, j) = s;
    }
  }
  return SymMatrix(out);
}

}  // namespace wsp
