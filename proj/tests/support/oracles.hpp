#pragma once

// Independent reference computations used only by tests. Nothing here may
// call into the solver paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "wsp/matrix.hpp"
#include "wsp/random.hpp"

namespace wsp::testing {

/// Random symmetric matrix with entries U(-1, 1).
inline SymMatrix random_symmetric(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  SymMatrix s(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) s.set(i, j, 2.0 * rng.uniform() - 1.0);
  return s;
}

/// G Gᵀ / n + shift·I for a random Gaussian G (n×n).
inline SymMatrix random_spd(std::size_t n, std::uint64_t seed, double shift = 0.1) {
  Rng rng(seed);
  Matrix g(n, n);
  for (double& v : g.data()) v = rng.normal();
  Matrix a = g * g.transpose();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) out(i, j) = a(i, j) / static_cast<double>(n) + (i == j ? shift : 0.0);
  return SymMatrix(out);
}

/// Proximal gradient (ISTA) on ½βᵀSβ − β_i + λ|β|₁ with step 1/L, where L
/// bounds the top eigenvalue by the max absolute row sum.
inline std::vector<double> ista_column(const SymMatrix& s, std::size_t i, double lambda,
                                       int iterations) {
  const std::size_t p = s.dim();
  double lip = 0.0;
  for (std::size_t r = 0; r < p; ++r) {
    double row = 0.0;
    for (std::size_t c = 0; c < p; ++c) row += std::abs(s(r, c));
    lip = std::max(lip, row);
  }
  const double step = 1.0 / lip;
  std::vector<double> beta(p, 0.0), grad(p);
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t r = 0; r < p; ++r) {
      double g = 0.0;
      for (std::size_t c = 0; c < p; ++c) g += s(r, c) * beta[c];
      grad[r] = g - (r == i ? 1.0 : 0.0);
    }
    for (std::size_t r = 0; r < p; ++r) {
      const double z = beta[r] - step * grad[r];
      const double t = step * lambda;
      beta[r] = z > t ? z - t : (z < -t ? z + t : 0.0);
    }
  }
  return beta;
}

/// Smallest eigenvalue of a symmetric matrix of dimension ≤ 3 in closed form.
inline double small_min_eigenvalue(const SymMatrix& a) {
  const std::size_t n = a.dim();
  if (n == 1) return a(0, 0);
  if (n == 2) {
    const double m = 0.5 * (a(0, 0) + a(1, 1));
    const double d = 0.5 * (a(0, 0) - a(1, 1));
    return m - std::sqrt(d * d + a(0, 1) * a(0, 1));
  }
  // Trigonometric solution of the characteristic cubic.
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3.0;
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
                    (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * p1;
  if (p2 <= 0.0) return q;
  const double pp = std::sqrt(p2 / 6.0);
  const double b00 = (a(0, 0) - q) / pp, b11 = (a(1, 1) - q) / pp, b22 = (a(2, 2) - q) / pp;
  const double b01 = a(0, 1) / pp, b02 = a(0, 2) / pp, b12 = a(1, 2) / pp;
  const double det = b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02) +
                     b02 * (b01 * b12 - b11 * b02);
  const double r = std::clamp(det / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  return q + 2.0 * pp * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
}

/// max over the box {|Σ − S|∞ ≤ t} of λ_min(Σ) for dim ≤ 3. The diagonal
/// sits at S_ii + t (λ_min is monotone in the PSD order); the off-diagonal
/// entries are found by a zooming grid search (λ_min is concave).
inline double best_min_eigenvalue_in_box(const SymMatrix& s, double t) {
  const std::size_t n = s.dim();
  SymMatrix m = s;
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, s(i, i) + t);
  if (n == 1) return m(0, 0);
  if (n == 2) {
    const double lo = s(0, 1) - t, hi = s(0, 1) + t;
    m.set(0, 1, std::clamp(0.0, lo, hi));
    return small_min_eigenvalue(m);
  }
  double center[3] = {s(0, 1), s(0, 2), s(1, 2)};
  double lo[3], hi[3];
  for (int k = 0; k < 3; ++k) {
    lo[k] = center[k] - t;
    hi[k] = center[k] + t;
  }
  double half = t;
  double best = -1e300;
  constexpr int kPoints = 13;
  for (int level = 0; level < 30 && half > 1e-13; ++level) {
    double best_x[3] = {center[0], center[1], center[2]};
    for (int a = 0; a < kPoints; ++a)
      for (int b = 0; b < kPoints; ++b)
        for (int c = 0; c < kPoints; ++c) {
          const int idx[3] = {a, b, c};
          double x[3];
          for (int k = 0; k < 3; ++k) {
            x[k] = center[k] - half + 2.0 * half * idx[k] / (kPoints - 1);
            x[k] = std::clamp(x[k], lo[k], hi[k]);
          }
          m.set(0, 1, x[0]);
          m.set(0, 2, x[1]);
          m.set(1, 2, x[2]);
          const double v = small_min_eigenvalue(m);
          if (v > best) {
            best = v;
            std::copy(x, x + 3, best_x);
          }
        }
    std::copy(best_x, best_x + 3, center);
    half *= 0.35;
  }
  return best;
}

/// Optimal value of min_{Σ ⪰ εI} ‖Σ − S‖∞ for dim ≤ 3, by bisection on t.
inline double sup_norm_projection_oracle(const SymMatrix& s, double eps) {
  double lo = 0.0;
  double hi = 1.0;
  while (best_min_eigenvalue_in_box(s, hi) < eps) hi *= 2.0;
  if (best_min_eigenvalue_in_box(s, 0.0) >= eps) return 0.0;
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (best_min_eigenvalue_in_box(s, mid) >= eps) hi = mid; else lo = mid;
  }
  return hi;
}

/// Median of a copy of v.
inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace wsp::testing
