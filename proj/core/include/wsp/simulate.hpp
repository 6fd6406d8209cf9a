#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "wsp/covariance.hpp"
#include "wsp/matrix.hpp"

namespace wsp {

enum class TruthKind { Toeplitz, DiamondBlock, CorrelationOfInverseToeplitz };

std::string_view to_string(TruthKind kind);

/// Ground-truth precision constructor.
struct TruthSpec {
  TruthKind kind = TruthKind::Toeplitz;
  double rho = 0.5;
  std::size_t p = 10;
};

/// (ρ^{|i−j|}); requires |ρ| < 1.
SymMatrix make_toeplitz_precision(std::size_t p, double rho);

/// diag(A, …, A)⁻¹ with the 4×4 diamond-graph covariance block
///   A = [[1, ρ, ρ, 2ρ²], [ρ, 1, 0, ρ], [ρ, 0, 1, ρ], [2ρ², ρ, ρ, 1]].
/// Requires p % 4 == 0 and |ρ| < 1/√2.
SymMatrix make_diamond_precision(std::size_t p, double rho);

/// The diamond block A itself (a covariance block, not a precision).
SymMatrix diamond_block(double rho);

/// D^{-1/2} Ω₀⁻¹ D^{-1/2}, D = diag(Ω₀⁻¹).
SymMatrix correlation_of_inverse(const SymMatrix& omega0);

/// Precision matrix for a truth spec. For CorrelationOfInverseToeplitz this
/// is the inverse of the correlation matrix of Toeplitz(ρ)⁻¹.
SymMatrix make_truth_precision(const TruthSpec& spec);

/// Rows L z with L = cholesky(sigma), z iid N(0, 1).
DataMatrix sample_gaussian(std::size_t n, const SymMatrix& sigma, std::uint64_t seed);

/// Multivariate t with ν degrees of freedom scaled so that its covariance
/// is `sigma`: rows L z sqrt((ν−2)/w), w ~ χ²(ν). Requires ν > 2.
DataMatrix sample_mvt(std::size_t n, const SymMatrix& sigma, double nu, std::uint64_t seed);

/// Standardization constants of g(z) = Φ((z − μ)/σ) under z ~ N(0, 1).
struct CdfTransform {
  double mu_g0 = 0.05;
  double sigma_g0 = 0.4;
  double mean = 0.0;
  double sd = 1.0;

  /// Computes mean and sd of g by adaptive quadrature.
  static CdfTransform standardized(double mu_g0, double sigma_g0);
  /// (g(z) − mean) / sd; strictly increasing in z.
  double operator()(double z) const;
};

/// Latent Z ~ N(0, sigma) pushed through the standardized Gaussian-CDF
/// transform coordinate-wise. `sigma` must have unit diagonal.
DataMatrix sample_nonparanormal(std::size_t n, const SymMatrix& sigma, double mu_g0,
                                double sigma_g0, std::uint64_t seed);

/// X(t) = L_B G(t) L_Aᵀ, G(t) an f×m standard normal matrix; cov(vec X) = A ⊗ B.
std::vector<Matrix> sample_matrix_normal(std::size_t n, const SymMatrix& a, const SymMatrix& b,
                                         std::uint64_t seed);

struct SparsitySummary {
  double q = 0.0;
  /// max_j Σ_i |ω_ij|^q (with |x|⁰ = 1 for x ≠ 0)
  double s_p = 0.0;
  /// ‖Ω‖_L1
  double m_p = 0.0;
  /// (1 + ρ^q)/(1 − ρ^q) for Toeplitz truths.
  std::optional<double> s_p_limit;
};

SparsitySummary sparsity_summary(const SymMatrix& omega, double q,
                                 std::optional<double> toeplitz_rho = std::nullopt);

/// Infinite-dimension ℓq radius of Toeplitz(ρ).
double toeplitz_sparsity_limit(double rho, double q);

}  // namespace wsp
