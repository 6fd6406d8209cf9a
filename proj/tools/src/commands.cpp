#include "commands.hpp"

#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "csv.hpp"
#include "scenario.hpp"
#include "wsp/random.hpp"
#include "wsp/scio.hpp"
#include "wsp/simulate.hpp"
#include "wsp/theory.hpp"

namespace wsp::cli {

GridSpec parse_grid(const std::string& text) {
  const auto parts = split_csv_record(text);
  GridSpec g;
  try {
    if (parts.size() != 2) throw std::invalid_argument("shape");
    std::size_t used = 0;
    const long count = std::stol(parts[0], &used);
    if (used != parts[0].size() || count < 1) throw std::invalid_argument("count");
    const double decades = std::stod(parts[1], &used);
    if (used != parts[1].size() || !(decades > 0.0)) throw std::invalid_argument("decades");
    g.count = static_cast<std::size_t>(count);
    g.decades = decades;
  } catch (const std::exception&) {
    throw UsageError("--grid expects <count,decades> with count >= 1 and decades > 0, got '" + text + "'");
  }
  return g;
}

namespace {

std::filesystem::path ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw UsageError(dir.string() + ": cannot create output directory: " + ec.message());
  return dir;
}

std::vector<std::string> column_names(std::string_view prefix, std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t k = 1; k <= count; ++k) out.push_back(std::string(prefix) + std::to_string(k));
  return out;
}

}  // namespace

void estimate_command(const EstimateOptions& opts, std::ostream& log) {
  const Matrix data = read_matrix_csv(opts.data, opts.header);
  ScenarioConfig cfg;
  cfg.estimator = opts.estimator;
  cfg.k_const = opts.k_const;
  cfg.epsilon = opts.epsilon;
  const auto pilot = pilot_covariance(cfg, data);

  const std::vector<double> grid =
      opts.lambda ? std::vector<double>{*opts.lambda} : lambda_grid(opts.grid.count, opts.grid.decades);
  const auto path = scio_path(pilot.matrix, grid);
  const auto dir = ensure_dir(opts.out);

  nlohmann::ordered_json meta;
  meta["estimator"] = to_string(pilot.kind);
  meta["n"] = data.rows();
  meta["p"] = data.cols();
  if (pilot.huber_H) meta["huber_H"] = *pilot.huber_H;
  meta["projected"] = pilot.projected;
  if (pilot.epsilon) meta["epsilon"] = *pilot.epsilon;
  auto& entries = meta["estimates"] = nlohmann::json::array();
  for (std::size_t k = 0; k < path.estimates.size(); ++k) {
    const auto& est = path.estimates[k];
    char name[32];
    if (grid.size() == 1) std::snprintf(name, sizeof name, "precision.csv");
    else std::snprintf(name, sizeof name, "precision_%03zu.csv", k);
    write_matrix_csv(dir / name, est.omega_tilde.matrix());
    const auto rep = kkt_report(pilot.matrix, est);
    nlohmann::ordered_json e;
    e["file"] = name;
    e["lambda"] = est.lambda;
    e["converged"] = est.converged();
    e["max_dual_violation"] = rep.max_dual;
    e["max_stationarity"] = rep.max_stationarity;
    auto& cols = e["columns"] = nlohmann::json::array();
    for (const auto& c : est.columns) {
      cols.push_back({{"index", c.index}, {"sweeps", c.sweeps}, {"converged", c.converged},
                      {"kkt_residual", c.kkt_residual()}});
    }
    entries.push_back(std::move(e));
  }
  write_text(dir / "precision.json", meta.dump(2) + "\n");
  log << "wrote " << path.estimates.size() << " estimate(s) for p=" << data.cols() << " to " << dir.string() << "\n";
}

void simulate_command(const ScenarioConfig& cfg, bool header, std::ostream& log) {
  validate(cfg);
  const auto dir = ensure_dir(cfg.out);
  const std::size_t n = cfg.n.front();
  const double rho = cfg.rho.front();
  const auto seed = replication_seed(cfg.seed, 0);
  nlohmann::ordered_json meta;
  meta["scenario"] = to_string(cfg.scenario);
  meta["n"] = n;
  meta["rho"] = rho;
  meta["seed"] = cfg.seed;
  meta["rng"] = kRngName;

  if (cfg.scenario == Scenario::MatrixData) {
    const SymMatrix a = correlation_of_inverse(make_toeplitz_precision(cfg.m, rho));
    const SymMatrix b = correlation_of_inverse(make_toeplitz_precision(cfg.f, cfg.rho_b));
    const auto samples = sample_matrix_normal(n, a, b, seed);
    // One row per sample: vec(X) stacks columns, entry c·f + r.
    Matrix vecs(n, cfg.m * cfg.f);
    for (std::size_t t = 0; t < n; ++t)
      for (std::size_t c = 0; c < cfg.m; ++c)
        for (std::size_t r = 0; r < cfg.f; ++r) vecs(t, c * cfg.f + r) = samples[t](r, c);
    write_matrix_csv(dir / "data.csv", vecs, header ? column_names("x", cfg.m * cfg.f) : std::vector<std::string>{});
    write_matrix_csv(dir / "a.csv", a.matrix());
    write_matrix_csv(dir / "b.csv", b.matrix());
    meta["m"] = cfg.m;
    meta["f"] = cfg.f;
    meta["rho_b"] = cfg.rho_b;
    meta["layout"] = "row t is vec(X(t)) with column-stacked index c*f + r";
  } else {
    const auto problem = build_problem(cfg, n, rho, seed);
    write_matrix_csv(dir / "data.csv", problem.data, header ? column_names("x", cfg.p) : std::vector<std::string>{});
    write_matrix_csv(dir / "precision.csv", problem.omega.matrix());
    write_matrix_csv(dir / "covariance.csv", problem.sigma.matrix());
    meta["p"] = cfg.p;
    meta["truth"] = to_string(cfg.truth);
    meta["distribution"] = to_string(cfg.distribution);
    if (cfg.distribution == Distribution::StudentT) meta["nu"] = cfg.nu;
  }
  write_text(dir / "metadata.json", meta.dump(2) + "\n");
  log << "wrote simulated data (n=" << n << ") to " << dir.string() << "\n";
}

void experiment_command(const ScenarioConfig& cfg, unsigned threads, std::ostream& log) {
  const auto result = run_scenario(cfg, threads);
  write_outputs(result, cfg.out);
  log << "scenario " << to_string(cfg.scenario) << ": " << result.rows.size() << " rows written to "
      << cfg.out.string() << "\n";
}

int check_bounds_command(const ScenarioConfig& cfg, std::ostream& log) {
  validate(cfg);
  if (cfg.scenario == Scenario::MatrixData) throw UsageError("check-bounds needs a vector-data scenario");
  const auto dir = ensure_dir(cfg.out);
  CsvTable table({"rho", "lambda", "q", "s_p", "m_p", "sigma_error_inf", "noise_lhs", "noise_ok", "sparsity_lhs",
                  "sparsity_ok", "hypotheses_hold", "column_l1_lhs", "column_l1_rhs", "column_inf_lhs",
                  "column_inf_rhs", "matrix_inf_lhs", "matrix_inf_rhs", "matrix_l1_lhs", "matrix_l1_rhs",
                  "all_satisfied", "max_kkt_residual"});
  int violations = 0;
  char line[256];
  std::snprintf(line, sizeof line, "%6s %10s %5s %5s %9s %9s %9s %9s %4s\n", "rho", "lambda", "q", "hyp",
                "col_l1", "col_inf", "mat_inf", "mat_l1", "ok");
  log << line;
  const auto ratio = [](const Inequality& i) { return i.rhs > 0 ? i.lhs / i.rhs : 0.0; };
  for (double rho : cfg.rho) {
    const auto problem = build_problem(cfg, cfg.n.front(), rho, replication_seed(cfg.seed, 0));
    const SymMatrix sigma_hat = cfg.exact_sigma ? problem.sigma : pilot_covariance(cfg, problem.data).matrix;
    const auto path = scio_path(sigma_hat, cfg.lambdas());
    for (const auto& est : path.estimates) {
      for (double q : cfg.q) {
        const auto bc = evaluate_bounds(problem.omega, est, sigma_hat, problem.sigma, q);
        const bool ok = bc.all_satisfied();
        if (bc.hypotheses_hold && !ok) ++violations;
        table.add({format_double(rho), format_double(bc.lambda), format_double(q), format_double(bc.s_p),
                   format_double(bc.m_p), format_double(bc.sigma_error_inf), format_double(bc.noise_condition.lhs),
                   bc.noise_condition.satisfied ? "true" : "false", format_double(bc.sparsity_condition.lhs),
                   bc.sparsity_condition.satisfied ? "true" : "false", bc.hypotheses_hold ? "true" : "false",
                   format_double(bc.column_l1.lhs), format_double(bc.column_l1.rhs), format_double(bc.column_inf.lhs),
                   format_double(bc.column_inf.rhs), format_double(bc.matrix_inf.lhs),
                   format_double(bc.matrix_inf.rhs), format_double(bc.matrix_l1.lhs),
                   format_double(bc.matrix_l1.rhs), ok ? "true" : "false", format_double(bc.max_kkt_residual)});
        // Inequality columns show lhs/rhs; ≤ 1 means the bound holds.
        std::snprintf(line, sizeof line, "%6.2f %10.4g %5.2f %5s %9.3g %9.3g %9.3g %9.3g %4s\n", rho, bc.lambda, q,
                      bc.hypotheses_hold ? "yes" : "no", ratio(bc.column_l1), ratio(bc.column_inf),
                      ratio(bc.matrix_inf), ratio(bc.matrix_l1), ok ? "yes" : "NO");
        log << line;
      }
    }
  }
  table.write(dir / "bounds.csv");
  log << "columns col_l1..mat_l1 are lhs/rhs ratios; bounds.csv has both sides\n";
  if (violations) log << violations << " row(s) satisfy the hypotheses but violate a bound\n";
  return violations;
}

}  // namespace wsp::cli
