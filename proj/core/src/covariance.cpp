#include "wsp/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "wsp/error.hpp"
#include "wsp/linalg.hpp"

namespace wsp {

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Sample: return "sample";
    case EstimatorKind::Huber: return "huber";
    case EstimatorKind::Spearman: return "spearman";
    case EstimatorKind::Kendall: return "kendall";
    case EstimatorKind::GeminiA: return "gemini_A";
    case EstimatorKind::GeminiB: return "gemini_B";
  }
  return "unknown";
}

std::optional<EstimatorKind> parse_estimator_kind(std::string_view name) {
  for (auto k : {EstimatorKind::Sample, EstimatorKind::Huber, EstimatorKind::Spearman,
                 EstimatorKind::Kendall, EstimatorKind::GeminiA, EstimatorKind::GeminiB}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

namespace {

void require_observations(const DataMatrix& data, std::size_t min_rows, const char* where) {
  if (data.rows() < min_rows || data.cols() == 0) {
    throw Error(ErrorCode::BadDimension, where,
                "need at least " + std::to_string(min_rows) + " rows and one column, got " +
                    std::to_string(data.rows()) + "x" + std::to_string(data.cols()));
  }
  if (!data.all_finite()) throw Error(ErrorCode::InvalidArgument, where, "non-finite data");
}

std::vector<double> column(const DataMatrix& data, std::size_t j) {
  std::vector<double> c(data.rows());
  for (std::size_t k = 0; k < data.rows(); ++k) c[k] = data(k, j);
  return c;
}

}  // namespace

CovarianceEstimate sample_covariance(const DataMatrix& data) {
  require_observations(data, 2, "covariance.sample_covariance");
  const std::size_t n = data.rows();
  const std::size_t p = data.cols();
  std::vector<double> mean(p, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < p; ++j) mean[j] += data(k, j);
  for (double& m : mean) m /= static_cast<double>(n);

  Matrix acc(p, p);
  std::vector<double> centered(p);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < p; ++j) centered[j] = data(k, j) - mean[j];
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i; j < p; ++j) acc(i, j) += centered[i] * centered[j];
  }
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) acc(i, j) /= static_cast<double>(n);

  return CovarianceEstimate{SymMatrix(acc), EstimatorKind::Sample, std::nullopt, false,
                            std::nullopt};
}

double huber_location(std::span<const double> x, double h) {
  if (x.empty()) throw Error(ErrorCode::BadDimension, "covariance.huber_location", "empty sample");
  if (!(h > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "covariance.huber_location", "H must be positive");
  }
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  auto score = [&](double mu) {
    double s = 0.0;
    for (double v : x) s += huber_psi(v - mu, h);
    return s;
  };

  // Bisect for the boundary of {μ : pred(score(μ))}, where pred is true at
  // `lo` and false at `hi`.
  auto boundary = [&](const std::function<bool(double)>& pred) {
    double lo = *mn - h;
    double hi = *mx + h;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (hi - lo <= 1e-12 * std::max(1.0, std::abs(mid))) break;
      if (pred(score(mid))) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  // Smallest root: score stays positive to its left. Largest root: score
  // stays nonnegative up to it. They differ only on a flat stretch.
  const double left = boundary([](double s) { return s > 0.0; });
  const double right = boundary([](double s) { return s >= 0.0; });
  return 0.5 * (left + right);
}

double huber_truncation(std::size_t n, std::size_t p, double k_const) {
  if (p < 2) {
    throw Error(ErrorCode::BadDimension, "covariance.huber_covariance", "need p >= 2 so log p > 0");
  }
  if (!(k_const > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "covariance.huber_covariance", "K must be positive");
  }
  return k_const * std::sqrt(static_cast<double>(n) / std::log(static_cast<double>(p)));
}

SymMatrix huber_raw_covariance(const DataMatrix& data, double h) {
  require_observations(data, 2, "covariance.huber_covariance");
  const std::size_t n = data.rows();
  const std::size_t p = data.cols();
  std::vector<double> mu(p);
  for (std::size_t j = 0; j < p; ++j) mu[j] = huber_location(column(data, j), h);

  Matrix out(p, p);
  std::vector<double> products(n);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      for (std::size_t k = 0; k < n; ++k) products[k] = data(k, i) * data(k, j);
      out(i, j) = huber_location(products, h) - mu[i] * mu[j];
    }
  }
  return SymMatrix(out);
}

CovarianceEstimate huber_covariance(const DataMatrix& data, double k_const, double epsilon) {
  const double h = huber_truncation(data.rows(), data.cols(), k_const);
  SymMatrix raw = huber_raw_covariance(data, h);
  return CovarianceEstimate{psd_project(raw, epsilon), EstimatorKind::Huber, h, true, epsilon};
}

std::vector<double> mid_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && x[order[end]] == x[order[start]]) ++end;
    // Positions start..end-1 hold ranks start+1..end.
    const double r = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = r;
    start = end;
  }
  return ranks;
}

namespace {

SymMatrix spearman_raw(const DataMatrix& data) {
  const std::size_t n = data.rows();
  const std::size_t p = data.cols();
  std::vector<std::vector<double>> centered(p);
  std::vector<double> norm(p);
  for (std::size_t j = 0; j < p; ++j) {
    auto r = mid_ranks(column(data, j));
    const double mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double& v : r) {
      v -= mean;
      ss += v * v;
    }
    if (ss == 0.0) {
      throw Error(ErrorCode::DegenerateColumn, "covariance.rank_correlation_matrix",
                  "column " + std::to_string(j) + " is constant");
    }
    norm[j] = std::sqrt(ss);
    centered[j] = std::move(r);
  }
  SymMatrix out(p);
  for (std::size_t i = 0; i < p; ++i) {
    out.set(i, i, 1.0);
    for (std::size_t j = i + 1; j < p; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += centered[i][k] * centered[j][k];
      const double rho = s / (norm[i] * norm[j]);
      out.set(i, j, 2.0 * std::sin(std::numbers::pi / 6.0 * rho));
    }
  }
  return out;
}

SymMatrix kendall_raw(const DataMatrix& data) {
  const std::size_t n = data.rows();
  const std::size_t p = data.cols();
  const std::size_t pairs = n * (n - 1) / 2;
  // Pairwise order signs per column; τ̂_ij is then a dot product.
  std::vector<std::vector<std::int8_t>> signs(p, std::vector<std::int8_t>(pairs));
  for (std::size_t j = 0; j < p; ++j) {
    auto& s = signs[j];
    std::size_t idx = 0;
    bool any = false;
    for (std::size_t k = 0; k < n; ++k) {
      const double a = data(k, j);
      for (std::size_t l = k + 1; l < n; ++l) {
        const double b = data(l, j);
        const std::int8_t v = a > b ? 1 : (a < b ? -1 : 0);
        any = any || v != 0;
        s[idx++] = v;
      }
    }
    if (!any) {
      throw Error(ErrorCode::DegenerateColumn, "covariance.rank_correlation_matrix",
                  "column " + std::to_string(j) + " is constant");
    }
  }
  const double scale = 2.0 / (static_cast<double>(n) * static_cast<double>(n - 1));
  SymMatrix out(p);
  for (std::size_t i = 0; i < p; ++i) {
    out.set(i, i, 1.0);
    for (std::size_t j = i + 1; j < p; ++j) {
      std::int64_t acc = 0;
      const auto* a = signs[i].data();
      const auto* b = signs[j].data();
      for (std::size_t k = 0; k < pairs; ++k) acc += a[k] * b[k];
      const double tau = scale * static_cast<double>(acc);
      out.set(i, j, std::sin(std::numbers::pi / 2.0 * tau));
    }
  }
  return out;
}

}  // namespace

SymMatrix rank_correlation_raw(const DataMatrix& data, RankMethod method) {
  require_observations(data, 2, "covariance.rank_correlation_matrix");
  return method == RankMethod::Spearman ? spearman_raw(data) : kendall_raw(data);
}

CovarianceEstimate rank_correlation_matrix(const DataMatrix& data, RankMethod method,
                                           double epsilon) {
  SymMatrix raw = rank_correlation_raw(data, method);
  const auto kind = method == RankMethod::Spearman ? EstimatorKind::Spearman : EstimatorKind::Kendall;
  return CovarianceEstimate{psd_project(raw, epsilon), kind, std::nullopt, true, epsilon};
}

std::vector<double> project_l1_ball(std::span<const double> v, double radius) {
  double total = 0.0;
  for (double x : v) total += std::abs(x);
  if (total <= radius) return {v.begin(), v.end()};
  if (radius <= 0.0) return std::vector<double>(v.size(), 0.0);

  std::vector<double> mags(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) mags[k] = std::abs(v[k]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    cumulative += mags[k];
    const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
    if (mags[k] > candidate) theta = candidate; else break;
  }
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double m = std::max(std::abs(v[k]) - theta, 0.0);
    out[k] = std::copysign(m, v[k]);
  }
  return out;
}

SymMatrix eigenvalue_clip(const SymMatrix& s, double epsilon) {
  return sym_eigen(s).recompose([epsilon](double l) { return std::max(l, epsilon); });
}

namespace {

constexpr int kCheckEvery = 10;
constexpr int kAdaptUntil = 1000;
constexpr double kBalance = 2.0;
constexpr double kRhoStep = 1.5;

// Lower bound on min_{Σ ⪰ εI} ‖Σ − S‖∞ from the dual
//   max ⟨W, εI − S⟩  s.t.  W ⪰ 0, Σ|W_ij| ≤ 1,
// evaluated at W ∝ Π_psd(−U), the scaled multiplier of the cone constraint.
double dual_bound(const Matrix& u, const SymMatrix& s, double epsilon) {
  const SymMatrix w = sym_eigen(SymMatrix::average(-1.0 * u)).recompose([](double l) {
    return std::max(l, 0.0);
  });
  const std::size_t p = s.dim();
  double mass = 0.0;
  double inner = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      mass += std::abs(w(i, j));
      inner += w(i, j) * ((i == j ? epsilon : 0.0) - s(i, j));
    }
  return mass > 0.0 ? inner / mass : 0.0;
}

}  // namespace

PsdProjection psd_project_detailed(const SymMatrix& s_tilde, double epsilon,
                                   const AdmmOptions& opts) {
  constexpr const char* kWhere = "covariance.psd_project";
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, kWhere, "epsilon must be positive");

  auto eig = sym_eigen(s_tilde);
  if (eig.eigenvalues.front() >= epsilon) return {s_tilde, 0.0, 0, true};

  const std::size_t p = s_tilde.dim();
  const double scale = std::max(1.0, matrix_norm(s_tilde, NormKind::ElementwiseInf));
  const double tol = opts.tolerance * scale;
  const double gap_tol = opts.gap_tolerance * scale;
  double rho = opts.penalty;
  const auto clip = [epsilon](double l) { return std::max(l, epsilon); };

  const Matrix& s = s_tilde.matrix();
  Matrix z = eig.recompose(clip).matrix();
  Matrix u(p, p);
  Matrix basis = eig.eigenvectors;
  std::vector<double> w(p * p);

  // Every Z is feasible; the first is the clip baseline.
  Matrix best = z;
  double best_obj = matrix_norm(z - s, NormKind::ElementwiseInf);
  const auto finish = [&](int it) {
    return PsdProjection{SymMatrix::average(best), best_obj, it, false};
  };

  for (int it = 1; it <= opts.max_iterations; ++it) {
    // Σ-update: S + prox_{‖·‖∞/ρ}(Z − U − S), with the prox written as
    // w − Π_{ℓ1(1/ρ)}(w) by Moreau decomposition.
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = z.data()[k] - u.data()[k] - s.data()[k];
    const auto shrink = project_l1_ball(w, 1.0 / rho);
    Matrix sigma(p, p);
    for (std::size_t k = 0; k < w.size(); ++k) sigma.data()[k] = s.data()[k] + w[k] - shrink[k];

    // Z-update: eigenvalue clip of Σ + U.
    const SymMatrix target = SymMatrix::average(sigma + u);
    auto step = sym_eigen_from(target, basis);
    basis = step.eigenvectors;
    Matrix z_next = step.recompose(clip).matrix();

    double primal = 0.0;
    double dual = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double r = sigma.data()[k] - z_next.data()[k];
      u.data()[k] += r;
      primal += r * r;
      const double d = z_next.data()[k] - z.data()[k];
      dual += d * d;
    }
    z = std::move(z_next);
    primal = std::sqrt(primal);
    dual = rho * std::sqrt(dual);

    const double obj = matrix_norm(z - s, NormKind::ElementwiseInf);
    if (obj < best_obj) {
      best_obj = obj;
      best = z;
    }
    if (primal <= tol && dual <= tol) return finish(it);
    if (it % kCheckEvery != 0) continue;
    if (best_obj - dual_bound(u, s_tilde, epsilon) <= gap_tol) return finish(it);

    // Residual balancing; U is the scaled dual, so it rescales with ρ.
    if (opts.adaptive && it <= kAdaptUntil) {
      double factor = 1.0;
      if (primal > kBalance * dual) factor = kRhoStep;
      else if (dual > kBalance * primal) factor = 1.0 / kRhoStep;
      if (factor != 1.0) {
        rho *= factor;
        for (double& v : u.data()) v /= factor;
      }
    }
  }
  throw Error(ErrorCode::ConvergenceFailure, kWhere,
              "ADMM did not reach tolerance " + std::to_string(tol) + " in " +
                  std::to_string(opts.max_iterations) + " iterations (p=" + std::to_string(p) + ")");
}

SymMatrix psd_project(const SymMatrix& s_tilde, double epsilon, const AdmmOptions& opts) {
  return psd_project_detailed(s_tilde, epsilon, opts).matrix;
}

std::pair<CovarianceEstimate, CovarianceEstimate> gemini_covariances(
    std::span<const Matrix> samples) {
  constexpr const char* kWhere = "covariance.gemini_covariances";
  if (samples.empty()) throw Error(ErrorCode::BadDimension, kWhere, "no samples");
  const std::size_t f = samples.front().rows();
  const std::size_t m = samples.front().cols();
  if (f == 0 || m == 0) throw Error(ErrorCode::BadDimension, kWhere, "empty sample matrix");

  Matrix col_gram(m, m);
  Matrix row_gram(f, f);
  for (const auto& x : samples) {
    if (x.rows() != f || x.cols() != m) {
      throw Error(ErrorCode::DimensionMismatch, kWhere, "samples differ in shape");
    }
    for (std::size_t r = 0; r < f; ++r) {
      auto xr = x.row(r);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) col_gram(i, j) += xr[i] * xr[j];
    }
    for (std::size_t a = 0; a < f; ++a) {
      auto xa = x.row(a);
      for (std::size_t b = a; b < f; ++b) {
        auto xb = x.row(b);
        double s = 0.0;
        for (std::size_t c = 0; c < m; ++c) s += xa[c] * xb[c];
        row_gram(a, b) += s;
      }
    }
  }

  auto normalize = [&](const Matrix& gram, const char* axis) {
    const std::size_t d = gram.rows();
    for (std::size_t i = 0; i < d; ++i) {
      if (!(gram(i, i) > 0.0)) {
        throw Error(ErrorCode::DegenerateAxis, kWhere,
                    std::string(axis) + " " + std::to_string(i) + " is identically zero");
      }
    }
    SymMatrix out(d);
    for (std::size_t i = 0; i < d; ++i) {
      out.set(i, i, 1.0);
      for (std::size_t j = i + 1; j < d; ++j)
        out.set(i, j, gram(i, j) / (std::sqrt(gram(i, i)) * std::sqrt(gram(j, j))));
    }
    return out;
  };

  CovarianceEstimate a{normalize(col_gram, "column"), EstimatorKind::GeminiA, std::nullopt, false,
                       std::nullopt};
  CovarianceEstimate b{normalize(row_gram, "row"), EstimatorKind::GeminiB, std::nullopt, false,
                       std::nullopt};
  return {std::move(a), std::move(b)};
}

}  // namespace wsp
