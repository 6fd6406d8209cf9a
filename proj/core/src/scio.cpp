#include "wsp/scio.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wsp/error.hpp"

namespace wsp {

namespace {

constexpr double kMinDiagonal = 1e-12;

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// g = Σ̂β − e_i
std::vector<double> gradient(const SymMatrix& s, std::size_t i, std::span<const double> beta) {
  auto g = s * beta;
  g[i] -= 1.0;
  return g;
}

KktViolation kkt_from_gradient(std::span<const double> g, std::span<const double> beta,
                               double lambda) {
  KktViolation v;
  for (std::size_t j = 0; j < g.size(); ++j) {
    v.dual = std::max(v.dual, std::abs(g[j]) - lambda);
    if (beta[j] != 0.0) v.stationarity = std::max(v.stationarity, std::abs(g[j] + lambda * sign(beta[j])));
  }
  v.dual = std::max(v.dual, 0.0);
  return v;
}

class ColumnSolver {
 public:
  ColumnSolver(const SymMatrix& s, std::size_t i, double lambda, std::vector<double> beta)
      : s_(s), i_(i), lambda_(lambda), beta_(std::move(beta)), g_(gradient(s, i, beta_)) {}

  // One cyclic pass over `coords`; returns the largest coordinate move.
  template <typename Coords>
  double sweep(const Coords& coords) {
    double max_change = 0.0;
    for (std::size_t j : coords) {
      const double d = s_(j, j);
      const double old = beta_[j];
      const double z = d * old - g_[j];
      const double next = soft_threshold(z, lambda_) / d;
      const double delta = next - old;
      if (delta == 0.0) continue;
      beta_[j] = next;
      auto col = s_.row(j);
      for (std::size_t k = 0; k < g_.size(); ++k) g_[k] += delta * col[k];
      max_change = std::max(max_change, std::abs(delta));
    }
    return max_change;
  }

  void refresh_gradient() { g_ = gradient(s_, i_, beta_); }

  std::vector<std::size_t> active_set() const {
    std::vector<std::size_t> a;
    for (std::size_t j = 0; j < beta_.size(); ++j)
      if (beta_[j] != 0.0) a.push_back(j);
    return a;
  }

  KktViolation kkt() const { return kkt_from_gradient(g_, beta_, lambda_); }

  // Exact solve of Σ̂_AA β_A = e_iA − λ sign(β_A) on the current support.
  void polish() {
    const auto active = active_set();
    if (active.empty()) return;
    SymMatrix sub(active.size());
    std::vector<double> rhs(active.size());
    for (std::size_t a = 0; a < active.size(); ++a) {
      for (std::size_t b = a; b < active.size(); ++b) sub.set(a, b, s_(active[a], active[b]));
      rhs[a] = (active[a] == i_ ? 1.0 : 0.0) - lambda_ * sign(beta_[active[a]]);
    }
    std::vector<double> x;
    try {
      x = cholesky_solve(cholesky(sub), rhs);
    } catch (const Error&) {
      return;  // singular on the support: keep the coordinate-descent iterate
    }
    std::vector<double> candidate(beta_.size(), 0.0);
    for (std::size_t a = 0; a < active.size(); ++a) {
      if (sign(x[a]) != sign(beta_[active[a]])) return;
      candidate[active[a]] = x[a];
    }
    auto g = gradient(s_, i_, candidate);
    if (kkt_from_gradient(g, candidate, lambda_).worst() <= kkt().worst()) {
      beta_ = std::move(candidate);
      g_ = std::move(g);
    }
  }

  // Newton step on the support with fixed signs, cut at the first sign
  // change. The quadratic on the orthant is minimized at t = 1, so every
  // t in (0, 1] lowers the objective. Returns false if Σ̂_AA is singular.
  bool newton_step() {
    const auto active = active_set();
    if (active.empty()) return true;
    SymMatrix sub(active.size());
    std::vector<double> rhs(active.size());
    for (std::size_t a = 0; a < active.size(); ++a) {
      for (std::size_t b = a; b < active.size(); ++b) sub.set(a, b, s_(active[a], active[b]));
      rhs[a] = (active[a] == i_ ? 1.0 : 0.0) - lambda_ * sign(beta_[active[a]]);
    }
    std::vector<double> x;
    try {
      x = cholesky_solve(cholesky(sub), rhs);
    } catch (const Error&) {
      return false;
    }
    double t = 1.0;
    std::size_t hit = active.size();
    for (std::size_t a = 0; a < active.size(); ++a) {
      const double b = beta_[active[a]];
      if (sign(x[a]) != sign(b)) {
        const double ta = b / (b - x[a]);
        if (ta < t) t = ta, hit = a;
      }
    }
    for (std::size_t a = 0; a < active.size(); ++a) {
      double& b = beta_[active[a]];
      b = a == hit ? 0.0 : b + t * (x[a] - b);
    }
    refresh_gradient();
    return true;
  }

  std::vector<double>& beta() { return beta_; }

 private:
  const SymMatrix& s_;
  std::size_t i_;
  double lambda_;
  std::vector<double> beta_;
  std::vector<double> g_;
};

}  // namespace

bool PrecisionEstimate::converged() const {
  return std::all_of(columns.begin(), columns.end(), [](const auto& c) { return c.converged; });
}

Matrix PrecisionEstimate::omega_hat() const {
  const std::size_t p = columns.size();
  Matrix m(p, p);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < p; ++i) m(i, j) = columns[j].beta[i];
  return m;
}

double scio_objective(const SymMatrix& sigma_hat, std::size_t i, std::span<const double> beta,
                      double lambda) {
  const auto sb = sigma_hat * beta;
  double quad = 0.0;
  double l1 = 0.0;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    quad += beta[j] * sb[j];
    l1 += std::abs(beta[j]);
  }
  return 0.5 * quad - beta[i] + lambda * l1;
}

KktViolation column_kkt(const SymMatrix& sigma_hat, std::size_t i, std::span<const double> beta,
                        double lambda) {
  return kkt_from_gradient(gradient(sigma_hat, i, beta), beta, lambda);
}

ColumnSolution scio_column(const SymMatrix& sigma_hat, std::size_t i, double lambda,
                           std::optional<std::span<const double>> warm_start,
                           const SolverOptions& opts) {
  constexpr const char* kWhere = "scio.scio_column";
  const std::size_t p = sigma_hat.dim();
  if (i >= p) throw Error(ErrorCode::InvalidArgument, kWhere, "column index out of range");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidArgument, kWhere, "lambda must be positive and finite");
  }
  for (std::size_t j = 0; j < p; ++j) {
    if (!(sigma_hat(j, j) > kMinDiagonal)) {
      throw Error(ErrorCode::NonPositiveDiagonal, kWhere,
                  "diagonal entry " + std::to_string(j) + " is " + std::to_string(sigma_hat(j, j)));
    }
  }
  std::vector<double> beta(p, 0.0);
  if (warm_start) {
    if (warm_start->size() != p) throw Error(ErrorCode::DimensionMismatch, kWhere, "warm start length");
    beta.assign(warm_start->begin(), warm_start->end());
  }

  ColumnSolver solver(sigma_hat, i, lambda, std::move(beta));
  ColumnSolution out;
  out.index = i;
  out.lambda = lambda;

  std::vector<std::size_t> all(p);
  for (std::size_t j = 0; j < p; ++j) all[j] = j;
  auto record = [&] {
    if (opts.record_objective)
      out.objective_trace.push_back(scio_objective(sigma_hat, i, solver.beta(), lambda));
  };
  if (opts.record_objective) record();

  int sweeps = 0;
  while (sweeps < opts.max_sweeps) {
    const double change = solver.sweep(all);
    ++sweeps;
    record();
    const double scale = std::max(1.0, inf_norm(solver.beta()));
    if (change <= opts.change_tolerance * scale) {
      solver.refresh_gradient();
      if (solver.kkt().worst() <= opts.kkt_tolerance) {
        out.converged = true;
        break;
      }
    }
    if (solver.newton_step()) {
      record();
      continue;
    }
    // Singular on the support: iterate there until it settles instead.
    const auto active = solver.active_set();
    while (sweeps < opts.max_sweeps && !active.empty()) {
      const double inner = solver.sweep(active);
      ++sweeps;
      record();
      if (inner <= opts.change_tolerance * std::max(1.0, inf_norm(solver.beta()))) break;
    }
  }

  solver.refresh_gradient();
  if (out.converged && opts.polish) solver.polish();
  out.beta = std::move(solver.beta());
  out.kkt = column_kkt(sigma_hat, i, out.beta, lambda);
  out.sweeps = sweeps;
  return out;
}

SymMatrix symmetrize(const Matrix& omega_hat) {
  const std::size_t p = omega_hat.rows();
  if (omega_hat.cols() != p) {
    throw Error(ErrorCode::DimensionMismatch, "scio.symmetrize", "matrix is not square");
  }
  SymMatrix out(p);
  for (std::size_t i = 0; i < p; ++i) {
    out.set(i, i, omega_hat(i, i));
    for (std::size_t j = i + 1; j < p; ++j) {
      const double bij = omega_hat(i, j);
      const double bji = omega_hat(j, i);
      out.set(i, j, std::abs(bij) <= std::abs(bji) ? bij : bji);
    }
  }
  return out;
}

PrecisionEstimate scio_estimate(const SymMatrix& sigma_hat, double lambda,
                                const PrecisionEstimate* warm, const SolverOptions& opts) {
  const std::size_t p = sigma_hat.dim();
  if (warm && warm->columns.size() != p) {
    throw Error(ErrorCode::DimensionMismatch, "scio.scio_estimate", "warm start dimension");
  }
  PrecisionEstimate est;
  est.lambda = lambda;
  est.columns.reserve(p);
  for (std::size_t i = 0; i < p; ++i) {
    std::optional<std::span<const double>> start;
    if (warm) start = std::span<const double>(warm->columns[i].beta);
    try {
      est.columns.push_back(scio_column(sigma_hat, i, lambda, start, opts));
    } catch (const Error& e) {
      throw Error(e.code(), "scio.scio_estimate", "column " + std::to_string(i) + ": " + e.what());
    }
  }
  est.omega_tilde = symmetrize(est.omega_hat());
  return est;
}

LambdaPath scio_path(const SymMatrix& sigma_hat, std::span<const double> grid,
                     const SolverOptions& opts) {
  constexpr const char* kWhere = "scio.scio_path";
  if (grid.empty()) throw Error(ErrorCode::EmptyPath, kWhere, "empty grid");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0)) throw Error(ErrorCode::InvalidArgument, kWhere, "grid values must be positive");
    if (k > 0 && !(grid[k] < grid[k - 1])) {
      throw Error(ErrorCode::InvalidArgument, kWhere, "grid must be strictly decreasing");
    }
  }
  LambdaPath path;
  path.grid.assign(grid.begin(), grid.end());
  path.estimates.reserve(grid.size());
  for (double lambda : grid) {
    const PrecisionEstimate* warm = path.estimates.empty() ? nullptr : &path.estimates.back();
    path.estimates.push_back(scio_estimate(sigma_hat, lambda, warm, opts));
  }
  return path;
}

std::vector<double> lambda_grid(std::size_t count, double decades, double lambda_max) {
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "scio.lambda_grid", "count must be >= 1");
  if (!(lambda_max > 0.0) || !(decades >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "scio.lambda_grid", "bad grid range");
  }
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = lambda_max;
    return grid;
  }
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(count - 1);
    grid[k] = lambda_max * std::pow(10.0, -decades * t);
  }
  return grid;
}

KktReport kkt_report(const SymMatrix& sigma_hat, const PrecisionEstimate& est) {
  if (est.columns.size() != sigma_hat.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "scio.kkt_report", "estimate dimension");
  }
  KktReport r;
  for (const auto& c : est.columns) {
    auto v = column_kkt(sigma_hat, c.index, c.beta, est.lambda);
    r.max_dual = std::max(r.max_dual, v.dual);
    r.max_stationarity = std::max(r.max_stationarity, v.stationarity);
    r.columns.push_back(v);
  }
  return r;
}

double KroneckerPrecision::operator()(std::size_t row, std::size_t col) const {
  const std::size_t f = b_.dim();
  return a_(row / f, col / f) * b_(row % f, col % f);
}

std::vector<double> KroneckerPrecision::apply(std::span<const double> v) const {
  const std::size_t f = b_.dim();
  const std::size_t m = a_.dim();
  if (v.size() != f * m) {
    throw Error(ErrorCode::DimensionMismatch, "scio.KroneckerPrecision", "vector length");
  }
  Matrix x(f, m);
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t r = 0; r < f; ++r) x(r, c) = v[c * f + r];
  const Matrix y = b_.matrix() * x * a_.matrix();
  std::vector<double> out(f * m);
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t r = 0; r < f; ++r) out[c * f + r] = y(r, c);
  return out;
}

double KroneckerPrecision::spectral_norm() const {
  return matrix_norm(a_, NormKind::Spectral) * matrix_norm(b_, NormKind::Spectral);
}

SymMatrix KroneckerPrecision::assemble(std::size_t cap) const { return kronecker(a_, b_, cap); }

GeminiPrecision gemini_precision(const CovarianceEstimate& sigma_a, const CovarianceEstimate& sigma_b,
                                 double lambda_a, double lambda_b, std::size_t cap,
                                 const SolverOptions& opts) {
  auto a = scio_estimate(sigma_a.matrix, lambda_a, nullptr, opts);
  auto b = scio_estimate(sigma_b.matrix, lambda_b, nullptr, opts);
  KroneckerPrecision product(a.omega_tilde, b.omega_tilde);
  std::optional<SymMatrix> assembled;
  if (product.dim() <= cap) assembled = product.assemble(cap);
  return {std::move(a), std::move(b), std::move(product), std::move(assembled)};
}

}  // namespace wsp
