#include "scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <map>
#include <optional>
#include <thread>

#include <json.hpp>

#include "csv.hpp"
#include "svg.hpp"
#include "wsp/random.hpp"
#include "wsp/scio.hpp"
#include "wsp/simulate.hpp"

namespace wsp::cli {

std::string_view norm_name(NormKind kind) {
  switch (kind) {
    case NormKind::ElementwiseInf: return "elementwise_inf";
    case NormKind::Spectral: return "spectral";
    case NormKind::L1: return "l1";
    case NormKind::Frobenius: return "frobenius";
    case NormKind::ScaledFrobenius: return "scaled_frobenius";
  }
  return "?";
}

std::uint64_t replication_seed(std::uint64_t seed, std::size_t rep) { return stream_seed(seed, rep); }

namespace {

bool is_rank(EstimatorKind k) { return k == EstimatorKind::Spearman || k == EstimatorKind::Kendall; }

}  // namespace

Problem build_problem(const ScenarioConfig& cfg, std::size_t n, double rho, std::uint64_t seed) {
  const TruthSpec spec{cfg.truth, rho, cfg.p};
  SymMatrix omega = make_truth_precision(spec);
  SymMatrix sigma = spec.kind == TruthKind::CorrelationOfInverseToeplitz
                        ? correlation_of_inverse(make_toeplitz_precision(cfg.p, rho))
                        : invert_spd(omega);
  DataMatrix data;
  switch (cfg.distribution) {
    case Distribution::Gaussian: data = sample_gaussian(n, sigma, seed); break;
    case Distribution::StudentT: data = sample_mvt(n, sigma, cfg.nu, seed); break;
    case Distribution::Nonparanormal:
      data = sample_nonparanormal(n, sigma, cfg.mu_g0, cfg.sigma_g0, seed);
      break;
  }
  // Rank pilots estimate the correlation matrix, so score against it.
  if (is_rank(cfg.estimator)) {
    bool unit = true;
    for (std::size_t i = 0; i < sigma.dim(); ++i) unit = unit && sigma(i, i) == 1.0;
    if (!unit) {
      sigma = correlation_of_inverse(omega);
      omega = invert_spd(sigma);
    }
  }
  return {std::move(omega), std::move(sigma), std::move(data)};
}

CovarianceEstimate pilot_covariance(const ScenarioConfig& cfg, const DataMatrix& data) {
  switch (cfg.estimator) {
    case EstimatorKind::Sample: return sample_covariance(data);
    case EstimatorKind::Huber: return huber_covariance(data, cfg.k_const, cfg.epsilon);
    case EstimatorKind::Spearman: return rank_correlation_matrix(data, RankMethod::Spearman, cfg.epsilon);
    case EstimatorKind::Kendall: return rank_correlation_matrix(data, RankMethod::Kendall, cfg.epsilon);
    case EstimatorKind::GeminiA:
    case EstimatorKind::GeminiB: break;
  }
  throw UsageError("estimator '" + std::string(to_string(cfg.estimator)) + "' needs matrix-variate data");
}

unsigned resolve_threads(int requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  if (const char* env = std::getenv("WSP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    throw UsageError("WSP_THREADS must be a positive integer, got '" + std::string(env) + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct Job {
  std::size_t n;
  double rho;
  std::size_t rep;
};

struct JobOutput {
  std::vector<ResultRow> rows;
  double seconds = 0.0;
};

ResultRow base_row(const ScenarioConfig& cfg, const Job& job, const PrecisionEstimate& est) {
  ResultRow row;
  row.scenario = cfg.scenario;
  row.replication = job.rep;
  row.n = job.n;
  row.rho = job.rho;
  row.lambda = est.lambda;
  row.estimator = cfg.estimator;
  row.converged = est.converged();
  for (const auto& c : est.columns) {
    row.sweeps += c.sweeps;
    row.max_kkt_residual = std::max(row.max_kkt_residual, c.kkt_residual());
  }
  return row;
}

void emit(const ScenarioConfig& cfg, const Job& job, const PrecisionEstimate& est, const ErrorReport& errors,
          const SymMatrix& omega, const SymMatrix& sigma_hat, const SymMatrix& sigma, JobOutput& out) {
  for (double q : cfg.q) {
    ResultRow row = base_row(cfg, job, est);
    row.q = q;
    row.errors = errors;
    const auto bc = evaluate_bounds(omega, est, sigma_hat, sigma, q);
    row.sigma_error_inf = bc.sigma_error_inf;
    row.hypotheses_hold = bc.hypotheses_hold;
    row.bounds_satisfied = bc.all_satisfied();
    out.rows.push_back(std::move(row));
  }
}

JobOutput run_vector_job(const ScenarioConfig& cfg, const Job& job, const std::vector<double>& grid) {
  JobOutput out;
  const auto problem = build_problem(cfg, job.n, job.rho, replication_seed(cfg.seed, job.rep));
  const auto pilot = pilot_covariance(cfg, problem.data);
  const auto path = scio_path(pilot.matrix, grid);
  for (const auto& est : path.estimates) {
    emit(cfg, job, est, error_report(est.omega_tilde, problem.omega), problem.omega, pilot.matrix, problem.sigma,
         out);
  }
  return out;
}

JobOutput run_matrix_job(const ScenarioConfig& cfg, const Job& job, const std::vector<double>& grid) {
  JobOutput out;
  const SymMatrix a = correlation_of_inverse(make_toeplitz_precision(cfg.m, job.rho));
  const SymMatrix b = correlation_of_inverse(make_toeplitz_precision(cfg.f, cfg.rho_b));
  const SymMatrix a_inv = invert_spd(a);
  const KroneckerPrecision truth(a_inv, invert_spd(b));
  const auto samples = sample_matrix_normal(job.n, a, b, replication_seed(cfg.seed, job.rep));
  const auto [sa, sb] = gemini_covariances(samples);
  const auto omega_b = scio_estimate(sb.matrix, cfg.lambda_b_for(job.n));
  const auto path = scio_path(sa.matrix, grid);
  for (const auto& est : path.estimates) {
    const KroneckerPrecision product(est.omega_tilde, omega_b.omega_tilde);
    emit(cfg, job, est, kronecker_error_report(product, truth), a_inv, sa.matrix, a, out);
    if (!omega_b.converged()) {
      for (std::size_t k = out.rows.size() - cfg.q.size(); k < out.rows.size(); ++k) out.rows[k].converged = false;
    }
  }
  return out;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg, unsigned threads) {
  validate(cfg);
  const auto grid = cfg.lambdas();
  std::vector<Job> jobs;
  for (auto n : cfg.n)
    for (double rho : cfg.rho)
      for (std::size_t rep = 0; rep < cfg.replications; ++rep) jobs.push_back({n, rho, rep});

  std::vector<std::optional<JobOutput>> slots(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < jobs.size();) {
      try {
        const auto t0 = std::chrono::steady_clock::now();
        slots[k] = cfg.scenario == Scenario::MatrixData ? run_matrix_job(cfg, jobs[k], grid)
                                                        : run_vector_job(cfg, jobs[k], grid);
        slots[k]->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  ScenarioResult result;
  result.config = cfg;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    auto& rows = slots[k]->rows;
    result.rows.insert(result.rows.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
    result.timings.push_back({jobs[k].rep, jobs[k].n, jobs[k].rho, slots[k]->seconds});
  }
  return result;
}

std::vector<OracleRow> oracle_rows(const ScenarioResult& result) {
  const double q0 = result.config.q.front();
  std::vector<OracleRow> out;
  std::size_t k = 0;
  const auto& rows = result.rows;
  while (k < rows.size()) {
    // Rows of one job are contiguous.
    std::size_t end = k;
    while (end < rows.size() && rows[end].n == rows[k].n && rows[end].rho == rows[k].rho &&
           rows[end].replication == rows[k].replication)
      ++end;
    for (NormKind kind : kAllNorms) {
      const ResultRow* best = nullptr;
      for (std::size_t r = k; r < end; ++r) {
        if (rows[r].q != q0) continue;
        const double e = rows[r].errors.get(kind);
        if (!best || e < best->errors.get(kind) || (e == best->errors.get(kind) && rows[r].lambda > best->lambda))
          best = &rows[r];
      }
      if (best) out.push_back({best->replication, best->n, best->rho, kind, best->lambda, best->errors.get(kind)});
    }
    k = end;
  }
  return out;
}

namespace {

std::string flag(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string results_csv(const ScenarioResult& result) {
  CsvTable table({"scenario", "replication", "n", "rho", "lambda", "q", "estimator", "elementwise_inf", "spectral",
                  "l1", "frobenius", "scaled_frobenius", "sigma_error_inf", "hypotheses_hold", "bounds_satisfied",
                  "sweeps", "converged", "max_kkt_residual"});
  for (const auto& r : result.rows) {
    table.add({std::string(to_string(r.scenario)), std::to_string(r.replication), std::to_string(r.n),
               format_double(r.rho), format_double(r.lambda), format_double(r.q),
               std::string(to_string(r.estimator)), format_double(r.errors.elementwise_inf),
               format_double(r.errors.spectral), format_double(r.errors.l1), format_double(r.errors.frobenius),
               format_double(r.errors.scaled_frobenius), format_double(r.sigma_error_inf), flag(r.hypotheses_hold),
               flag(r.bounds_satisfied), std::to_string(r.sweeps), flag(r.converged),
               format_double(r.max_kkt_residual)});
  }
  return table.str();
}

namespace {

std::string series_label(const ScenarioConfig& cfg, std::size_t n, double rho) {
  char buf[64];
  if (cfg.n.size() > 1 && cfg.rho.size() > 1) std::snprintf(buf, sizeof buf, "rho=%.2f, n=%zu", rho, n);
  else if (cfg.n.size() > 1) std::snprintf(buf, sizeof buf, "n=%zu", n);
  else std::snprintf(buf, sizeof buf, "rho=%.2f", rho);
  return buf;
}

LineChart chart_for(const ScenarioResult& result, const std::vector<OracleRow>& oracle, NormKind kind) {
  const auto& cfg = result.config;
  LineChart chart;
  chart.y_label = std::string(norm_name(kind)) + " error";
  if (cfg.scenario == Scenario::DiamondSweep) {
    // Mean oracle-tuned error against ρ, one series per n.
    chart.title = std::string(to_string(cfg.scenario)) + ": oracle-tuned " + std::string(norm_name(kind));
    chart.x_label = "rho";
    for (auto n : cfg.n) {
      Series s{cfg.n.size() > 1 ? "n=" + std::to_string(n) : "SCIO", {}, {}};
      for (double rho : cfg.rho) {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& o : oracle)
          if (o.norm == kind && o.n == n && o.rho == rho) sum += o.error, ++count;
        s.x.push_back(rho);
        s.y.push_back(count ? sum / static_cast<double>(count) : 0.0);
      }
      chart.series.push_back(std::move(s));
    }
    return chart;
  }
  chart.title = std::string(to_string(cfg.scenario)) + ": mean " + std::string(norm_name(kind)) + " error";
  chart.x_label = "lambda";
  chart.log_x = true;
  const double q0 = cfg.q.front();
  for (auto n : cfg.n)
    for (double rho : cfg.rho) {
      std::map<double, std::pair<double, std::size_t>, std::greater<>> by_lambda;
      for (const auto& r : result.rows) {
        if (r.n != n || r.rho != rho || r.q != q0) continue;
        auto& acc = by_lambda[r.lambda];
        acc.first += r.errors.get(kind);
        acc.second += 1;
      }
      Series s{series_label(cfg, n, rho), {}, {}};
      for (const auto& [lambda, acc] : by_lambda) {
        s.x.push_back(lambda);
        s.y.push_back(acc.first / static_cast<double>(acc.second));
      }
      chart.series.push_back(std::move(s));
    }
  return chart;
}

nlohmann::ordered_json config_json(const ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  j["scenario"] = to_string(cfg.scenario);
  j["n"] = cfg.n;
  if (cfg.scenario == Scenario::MatrixData) {
    j["m"] = cfg.m;
    j["f"] = cfg.f;
    j["rho_b"] = cfg.rho_b;
    j["lambda_b"] = cfg.lambda_b;
    j["scale_lambda_b"] = cfg.scale_lambda_b;
  } else {
    j["p"] = cfg.p;
    j["truth"] = to_string(cfg.truth);
    j["distribution"] = to_string(cfg.distribution);
  }
  j["rho"] = cfg.rho;
  j["estimator"] = to_string(cfg.estimator);
  if (cfg.distribution == Distribution::StudentT) j["nu"] = cfg.nu;
  if (cfg.estimator == EstimatorKind::Huber) j["k_const"] = cfg.k_const;
  if (cfg.estimator != EstimatorKind::Sample) j["epsilon"] = cfg.epsilon;
  if (cfg.distribution == Distribution::Nonparanormal) {
    j["mu_g0"] = cfg.mu_g0;
    j["sigma_g0"] = cfg.sigma_g0;
  }
  j["q"] = cfg.q;
  if (cfg.lambda) {
    j["lambda"] = *cfg.lambda;
  } else {
    j["grid"] = {{"count", cfg.grid.count}, {"decades", cfg.grid.decades}, {"lambda_max", cfg.grid.lambda_max}};
  }
  j["replications"] = cfg.replications;
  j["seed"] = cfg.seed;
  return j;
}

}  // namespace

void write_outputs(const ScenarioResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw UsageError(dir.string() + ": cannot create output directory: " + ec.message());

  write_text(dir / "results.csv", results_csv(result));

  CsvTable timings({"replication", "n", "rho", "seconds"});
  for (const auto& t : result.timings)
    timings.add({std::to_string(t.replication), std::to_string(t.n), format_double(t.rho), format_double(t.seconds)});
  timings.write(dir / "timings.csv");

  const auto oracle = oracle_rows(result);
  CsvTable oracle_table({"replication", "n", "rho", "norm", "lambda", "error"});
  for (const auto& o : oracle)
    oracle_table.add({std::to_string(o.replication), std::to_string(o.n), format_double(o.rho),
                      std::string(norm_name(o.norm)), format_double(o.lambda), format_double(o.error)});
  oracle_table.write(dir / "oracle.csv");

  for (NormKind kind : kAllNorms) {
    write_text(dir / ("error_" + std::string(norm_name(kind)) + ".svg"), render_svg(chart_for(result, oracle, kind)));
  }

  nlohmann::ordered_json meta;
  meta["tool"] = "wsp";
  meta["rng"] = kRngName;
  meta["config"] = config_json(result.config);
  meta["lambda_grid"] = result.config.lambdas();
  auto& notes = meta["notes"] = nlohmann::json::array();
  if (result.config.distribution == Distribution::StudentT && result.config.scenario != Scenario::MatrixData) {
    notes.push_back("multivariate t scaled so its covariance equals the target (scale matrix (nu-2)/nu * Sigma)");
  }
  if (result.config.scenario == Scenario::MatrixData) {
    notes.push_back("errors compare the assembled Kronecker estimate with inv(A) (x) inv(B); bounds refer to the A factor");
  }
  if (is_rank(result.config.estimator)) {
    notes.push_back("rank pilots are scored against the latent correlation matrix and its inverse");
  }
  write_text(dir / "metadata.json", meta.dump(2) + "\n");
}

}  // namespace wsp::cli
