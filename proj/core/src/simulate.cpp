#include "wsp/simulate.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wsp/error.hpp"
#include "wsp/linalg.hpp"
#include "wsp/random.hpp"

namespace wsp {

std::string_view to_string(TruthKind kind) {
  switch (kind) {
    case TruthKind::Toeplitz: return "toeplitz";
    case TruthKind::DiamondBlock: return "diamond_block";
    case TruthKind::CorrelationOfInverseToeplitz: return "correlation_of_inverse_toeplitz";
  }
  return "unknown";
}

SymMatrix make_toeplitz_precision(std::size_t p, double rho) {
  if (p == 0) throw Error(ErrorCode::BadDimension, "simulate.make_toeplitz_precision", "p must be >= 1");
  if (!(std::abs(rho) < 1.0)) {
    throw Error(ErrorCode::RhoOutOfRange, "simulate.make_toeplitz_precision", "|rho| must be < 1");
  }
  SymMatrix out(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j)
      out.set(i, j, j == i ? 1.0 : std::pow(rho, static_cast<double>(j - i)));
  return out;
}

SymMatrix diamond_block(double rho) {
  const double c = 2.0 * rho * rho;
  return SymMatrix{{1.0, rho, rho, c}, {rho, 1.0, 0.0, rho}, {rho, 0.0, 1.0, rho}, {c, rho, rho, 1.0}};
}

SymMatrix make_diamond_precision(std::size_t p, double rho) {
  constexpr const char* kWhere = "simulate.make_diamond_precision";
  if (p == 0 || p % 4 != 0) {
    throw Error(ErrorCode::BadDimension, kWhere, "p must be a positive multiple of 4, got " + std::to_string(p));
  }
  if (!(std::abs(rho) < 1.0 / std::numbers::sqrt2)) {
    throw Error(ErrorCode::RhoOutOfRange, kWhere, "|rho| must be < 1/sqrt(2), got " + std::to_string(rho));
  }
  const SymMatrix block_inv = invert_spd(diamond_block(rho));
  SymMatrix out(p);
  for (std::size_t b = 0; b < p; b += 4)
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i; j < 4; ++j) out.set(b + i, b + j, block_inv(i, j));
  return out;
}

SymMatrix correlation_of_inverse(const SymMatrix& omega0) {
  const SymMatrix inv = invert_spd(omega0);
  const std::size_t p = inv.dim();
  std::vector<double> scale(p);
  for (std::size_t i = 0; i < p; ++i) scale[i] = 1.0 / std::sqrt(inv(i, i));
  SymMatrix out(p);
  for (std::size_t i = 0; i < p; ++i) {
    out.set(i, i, 1.0);
    for (std::size_t j = i + 1; j < p; ++j) out.set(i, j, inv(i, j) * scale[i] * scale[j]);
  }
  return out;
}

SymMatrix make_truth_precision(const TruthSpec& spec) {
  switch (spec.kind) {
    case TruthKind::Toeplitz: return make_toeplitz_precision(spec.p, spec.rho);
    case TruthKind::DiamondBlock: return make_diamond_precision(spec.p, spec.rho);
    case TruthKind::CorrelationOfInverseToeplitz:
      return invert_spd(correlation_of_inverse(make_toeplitz_precision(spec.p, spec.rho)));
  }
  throw Error(ErrorCode::InvalidArgument, "simulate.make_truth_precision", "unknown truth kind");
}

namespace {

// Row-wise L z for each of n rows, drawing z from `rng`.
void fill_correlated_row(const Matrix& l, Rng& rng, std::span<double> z, std::span<double> out) {
  for (double& v : z) v = rng.normal();
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k <= i; ++k) s += l(i, k) * z[k];
    out[i] = s;
  }
}

}  // namespace

DataMatrix sample_gaussian(std::size_t n, const SymMatrix& sigma, std::uint64_t seed) {
  const Matrix l = cholesky(sigma);
  const std::size_t p = sigma.dim();
  Rng rng(seed);
  DataMatrix x(n, p);
  std::vector<double> z(p);
  for (std::size_t k = 0; k < n; ++k) fill_correlated_row(l, rng, z, x.row(k));
  return x;
}

DataMatrix sample_mvt(std::size_t n, const SymMatrix& sigma, double nu, std::uint64_t seed) {
  if (!(nu > 2.0)) {
    throw Error(ErrorCode::NuTooSmall, "simulate.sample_mvt", "degrees of freedom must exceed 2");
  }
  const Matrix l = cholesky(sigma);
  const std::size_t p = sigma.dim();
  Rng rng(seed);
  DataMatrix x(n, p);
  std::vector<double> z(p);
  for (std::size_t k = 0; k < n; ++k) {
    auto row = x.row(k);
    fill_correlated_row(l, rng, z, row);
    const double w = rng.chi_square(nu);
    const double factor = std::sqrt((nu - 2.0) / w);
    for (double& v : row) v *= factor;
  }
  return x;
}

namespace {

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

CdfTransform CdfTransform::standardized(double mu_g0, double sigma_g0) {
  if (!(sigma_g0 > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "simulate.sample_nonparanormal", "sigma_g0 must be positive");
  }
  using boost::math::quadrature::gauss_kronrod;
  const double inf = std::numeric_limits<double>::infinity();
  auto g = [=](double z) { return std_normal_cdf((z - mu_g0) / sigma_g0); };
  const double m1 = gauss_kronrod<double, 61>::integrate(
      [&](double z) { return g(z) * std_normal_pdf(z); }, -inf, inf, 15, 1e-13);
  const double m2 = gauss_kronrod<double, 61>::integrate(
      [&](double z) { return g(z) * g(z) * std_normal_pdf(z); }, -inf, inf, 15, 1e-13);
  CdfTransform t;
  t.mu_g0 = mu_g0;
  t.sigma_g0 = sigma_g0;
  t.mean = m1;
  t.sd = std::sqrt(m2 - m1 * m1);
  return t;
}

double CdfTransform::operator()(double z) const {
  return (std_normal_cdf((z - mu_g0) / sigma_g0) - mean) / sd;
}

DataMatrix sample_nonparanormal(std::size_t n, const SymMatrix& sigma, double mu_g0,
                                double sigma_g0, std::uint64_t seed) {
  for (std::size_t i = 0; i < sigma.dim(); ++i) {
    if (std::abs(sigma(i, i) - 1.0) > 1e-12) {
      throw Error(ErrorCode::NotCorrelation, "simulate.sample_nonparanormal",
                  "diagonal entry " + std::to_string(i) + " is not 1");
    }
  }
  const auto transform = CdfTransform::standardized(mu_g0, sigma_g0);
  DataMatrix x = sample_gaussian(n, sigma, seed);
  for (double& v : x.data()) v = transform(v);
  return x;
}

std::vector<Matrix> sample_matrix_normal(std::size_t n, const SymMatrix& a, const SymMatrix& b,
                                         std::uint64_t seed) {
  const Matrix la = cholesky(a);
  const Matrix lb = cholesky(b);
  const Matrix la_t = la.transpose();
  const std::size_t m = a.dim();
  const std::size_t f = b.dim();
  Rng rng(seed);
  std::vector<Matrix> out;
  out.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    Matrix g(f, m);
    for (double& v : g.data()) v = rng.normal();
    out.push_back(lb * g * la_t);
  }
  return out;
}

double toeplitz_sparsity_limit(double rho, double q) {
  const double r = std::pow(std::abs(rho), q);
  if (rho == 0.0) return 1.0;
  if (r >= 1.0) return std::numeric_limits<double>::infinity();
  return (1.0 + r) / (1.0 - r);
}

SparsitySummary sparsity_summary(const SymMatrix& omega, double q, std::optional<double> toeplitz_rho) {
  if (!(q >= 0.0 && q < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "simulate.sparsity_summary", "q must lie in [0, 1)");
  }
  SparsitySummary s;
  s.q = q;
  const std::size_t p = omega.dim();
  for (std::size_t j = 0; j < p; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double v = std::abs(omega(i, j));
      if (q == 0.0) col += v != 0.0 ? 1.0 : 0.0;
      else col += std::pow(v, q);
    }
    s.s_p = std::max(s.s_p, col);
  }
  s.m_p = matrix_norm(omega, NormKind::L1);
  if (toeplitz_rho) s.s_p_limit = toeplitz_sparsity_limit(*toeplitz_rho, q);
  return s;
}

}  // namespace wsp
