#include "wsp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "wsp/error.hpp"
#include "wsp/random.hpp"

namespace wsp {

SymMatrix EigenDecomp::recompose() const {
  return recompose([](double v) { return v; });
}

Matrix cholesky(const SymMatrix& s) {
  const std::size_t n = s.dim();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) {
      throw Error(ErrorCode::NotPositiveDefinite, "linalg.cholesky",
                  "pivot " + std::to_string(j) + " is " + std::to_string(d));
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / ljj;
    }
  }
  return l;
}

std::vector<double> cholesky_solve(const Matrix& lower, std::span<const double> b) {
  const std::size_t n = lower.rows();
  std::vector<double> y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    double v = y[i];
    for (std::size_t k = 0; k < i; ++k) v -= lower(i, k) * y[k];
    y[i] = v / lower(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double v = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) v -= lower(k, ii) * y[k];
    y[ii] = v / lower(ii, ii);
  }
  return y;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

EigenDecomp jacobi(Matrix a, Matrix v, const JacobiOptions& opts) {
  const std::size_t n = a.rows();
  const double scale = std::max(1.0, matrix_norm(a, NormKind::ElementwiseInf));
  const double tol = opts.off_tolerance * scale;

  int sweep = 0;
  while (off_diagonal_norm(a) > tol) {
    if (sweep++ >= opts.max_sweeps) {
      throw Error(ErrorCode::ConvergenceFailure, "linalg.sym_eigen",
                  "off-diagonal norm still " + std::to_string(off_diagonal_norm(a)) + " after " +
                      std::to_string(opts.max_sweeps) + " sweeps");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Rotation angle that annihilates a(p, q).
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

  EigenDecomp out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  return out;
}

}  // namespace

EigenDecomp sym_eigen(const SymMatrix& s, const JacobiOptions& opts) {
  return jacobi(s.matrix(), Matrix::identity(s.dim()), opts);
}

EigenDecomp sym_eigen_from(const SymMatrix& s, const Matrix& basis, const JacobiOptions& opts) {
  if (basis.rows() != s.dim() || basis.cols() != s.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "linalg.sym_eigen", "basis shape");
  }
  Matrix rotated = SymMatrix::average(basis.transpose() * s.matrix() * basis).matrix();
  return jacobi(std::move(rotated), basis, opts);
}

double min_eigenvalue(const SymMatrix& s) { return sym_eigen(s).eigenvalues.front(); }

namespace {

// Smallest and largest eigenvalues of the tridiagonal matrix with diagonal d
// and off-diagonal e, by Sturm-sequence bisection inside the Gershgorin hull.
std::pair<double, double> tridiagonal_extremes(const std::vector<double>& d, const std::vector<double>& e) {
  const std::size_t n = d.size();
  double lo = d[0], hi = d[0];
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(e[i]) : 0.0);
    lo = std::min(lo, d[i] - r);
    hi = std::max(hi, d[i] + r);
  }
  // Number of eigenvalues strictly below x.
  auto count_below = [&](double x) {
    std::size_t count = 0;
    double q = d[0] - x;
    const double tiny = 1e-300;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
      if (q == 0.0) q = tiny;
      q = d[i] - x - e[i - 1] * e[i - 1] / q;
      if (q < 0.0) ++count;
    }
    return count;
  };
  auto kth = [&](std::size_t k) {  // k-th smallest, 0-based
    double l = lo, h = hi;
    for (int it = 0; it < 200 && h - l > 1e-15 * std::max(1.0, std::abs(l) + std::abs(h)); ++it) {
      const double mid = 0.5 * (l + h);
      if (count_below(mid) > k) h = mid; else l = mid;
    }
    return 0.5 * (l + h);
  };
  return {kth(0), kth(n - 1)};
}

// Extreme eigenvalues of a symmetric matrix: Householder reduction to
// tridiagonal form, then Sturm-sequence bisection.
double spectral_by_tridiagonal(const Matrix& s) {
  const std::size_t n = s.rows();
  Matrix a = s;
  std::vector<double> d(n), e(n > 0 ? n - 1 : 0);
  std::vector<double> v(n), pv(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double norm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) norm += a(i, k) * a(i, k);
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      e[k] = 0.0;
      continue;
    }
    const double alpha = a(k + 1, k) > 0.0 ? -norm : norm;
    double vnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i] = a(i, k) - (i == k + 1 ? alpha : 0.0);
      vnorm += v[i] * v[i];
    }
    vnorm = std::sqrt(vnorm);
    e[k] = alpha;
    if (vnorm == 0.0) continue;
    for (std::size_t i = k + 1; i < n; ++i) v[i] /= vnorm;
    double kk = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) acc += a(i, j) * v[j];
      pv[i] = acc;
      kk += v[i] * acc;
    }
    for (std::size_t i = k + 1; i < n; ++i) pv[i] -= kk * v[i];
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= 2.0 * (v[i] * pv[j] + pv[i] * v[j]);
  }
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
  if (n >= 2) e[n - 2] = a(n - 1, n - 2);

  const auto [lo, hi] = tridiagonal_extremes(d, e);
  return std::max(std::abs(lo), std::abs(hi));
}

bool is_symmetric(const Matrix& a) {
  if (a.rows() != a.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (a(i, j) != a(j, i)) return false;
  return true;
}

double symmetric_spectral(const SymMatrix& s) {
  if (s.dim() > kDenseSpectralLimit) return spectral_by_tridiagonal(s.matrix());
  auto eig = sym_eigen(s);
  return std::max(std::abs(eig.eigenvalues.front()), std::abs(eig.eigenvalues.back()));
}

}  // namespace

double matrix_norm(const Matrix& a, NormKind kind) {
  switch (kind) {
    case NormKind::ElementwiseInf: {
      double m = 0.0;
      for (double v : a.data()) m = std::max(m, std::abs(v));
      return m;
    }
    case NormKind::L1: {
      std::vector<double> col(a.cols(), 0.0);
      for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) col[j] += std::abs(a(i, j));
      return col.empty() ? 0.0 : *std::max_element(col.begin(), col.end());
    }
    case NormKind::Spectral: {
      if (a.empty()) return 0.0;
      if (is_symmetric(a)) return symmetric_spectral(SymMatrix(a));
      // Nonsymmetric input: sqrt of the top eigenvalue of AᵀA.
      const SymMatrix gram = SymMatrix::average(a.transpose() * a);
      return std::sqrt(std::max(0.0, symmetric_spectral(gram)));
    }
    case NormKind::Frobenius: {
      double s = 0.0;
      for (double v : a.data()) s += v * v;
      return std::sqrt(s);
    }
    case NormKind::ScaledFrobenius: {
      if (a.rows() == 0) return 0.0;
      double s = 0.0;
      for (double v : a.data()) s += v * v;
      return s / static_cast<double>(a.rows());
    }
  }
  return 0.0;
}

double matrix_norm(const SymMatrix& a, NormKind kind) { return matrix_norm(a.matrix(), kind); }

Matrix kronecker(const Matrix& a, const Matrix& b, std::size_t cap) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  if (rows > cap || cols > cap) {
    throw Error(ErrorCode::DimensionOverflow, "linalg.kronecker",
                std::to_string(rows) + "x" + std::to_string(cols) + " exceeds cap " +
                    std::to_string(cap));
  }
  Matrix k(rows, cols);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double aij = a(i, j);
      for (std::size_t r = 0; r < b.rows(); ++r)
        for (std::size_t c = 0; c < b.cols(); ++c)
          k(i * b.rows() + r, j * b.cols() + c) = aij * b(r, c);
    }
  return k;
}

SymMatrix kronecker(const SymMatrix& a, const SymMatrix& b, std::size_t cap) {
  return SymMatrix(kronecker(a.matrix(), b.matrix(), cap));
}

SymMatrix invert_spd(const SymMatrix& s) {
  const Matrix l = cholesky(s);
  const std::size_t n = s.dim();
  Matrix inv(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    auto col = cholesky_solve(l, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return SymMatrix::average(inv);
}

double symmetric_operator_norm(std::size_t dim, const LinearOperator& apply, double tolerance) {
  if (dim == 0) return 0.0;
  const auto dot = [](std::span<const double> x, std::span<const double> y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
  };
  Rng rng(0x243f6a8885a308d3ULL);
  std::vector<double> start(dim);
  for (double& v : start) v = rng.normal();
  const double start_norm = std::sqrt(dot(start, start));
  for (double& v : start) v /= start_norm;

  std::vector<std::vector<double>> basis{std::move(start)};
  std::vector<double> alpha, beta, history;
  for (;;) {
    const std::size_t k = basis.size();
    auto w = apply(basis.back());
    if (w.size() != dim) throw Error(ErrorCode::DimensionMismatch, "linalg.symmetric_operator_norm", "operator size");
    alpha.push_back(dot(basis.back(), w));
    // Two passes of Gram–Schmidt keep the basis orthogonal to rounding.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        const double c = dot(q, w);
        for (std::size_t i = 0; i < dim; ++i) w[i] -= c * q[i];
      }
    }
    const double b = std::sqrt(dot(w, w));
    const auto [lo, hi] = tridiagonal_extremes(alpha, beta);
    const double norm = std::max(std::abs(lo), std::abs(hi));
    history.push_back(norm);
    // Extreme Ritz values move outward monotonically toward the spectrum's
    // ends, so a stalled maximum over a window of steps has converged.
    constexpr std::size_t kWindow = 10;
    const bool stalled = k > kWindow && norm - history[k - 1 - kWindow] <= tolerance * norm;
    const bool breakdown = b <= 1e-14 * std::max(norm, 1e-300);
    if (k == dim || breakdown || stalled) return norm;
    beta.push_back(b);
    for (double& v : w) v /= b;
    basis.push_back(std::move(w));
  }
}

}  // namespace wsp
