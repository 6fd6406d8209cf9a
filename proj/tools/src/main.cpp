#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "scenario.hpp"
#include "wsp/error.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitBoundViolation = 1;

}  // namespace

int main(int argc, char** argv) {
  using namespace wsp;
  using namespace wsp::cli;

  CLI::App app{"Weak-sparsity precision matrix estimation by SCIO"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 0;
  bool paper_scale = false;
  bool header = false;
  std::string scenario_name;
  std::optional<std::size_t> replications;
  std::string estimator_name;
  std::optional<double> lambda;
  std::string grid_text;
  std::optional<double> k_const;
  std::optional<double> epsilon;
  std::string data_path;

  app.add_option("--config", config_path, "JSON scenario configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--out", out, "Output directory");
  app.add_option("--threads", threads, "Worker threads (default: WSP_THREADS, else all cores)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--paper-scale", paper_scale, "Use full-size dimensions (p=100, 80x40 matrix data)");
  app.add_flag("--header", header, "CSV matrices carry a header row");
  app.add_option("--scenario", scenario_name,
                 "diamond_sweep|toeplitz_path|robust_t|nonparanormal|matrix_data|custom");
  app.add_option("--replications", replications, "Replications per (n, rho)")->check(CLI::PositiveNumber);
  app.add_option("--estimator", estimator_name, "sample|huber|spearman|kendall");
  auto* lambda_opt = app.add_option("--lambda", lambda, "Single penalty level")->check(CLI::PositiveNumber);
  app.add_option("--grid", grid_text, "Log grid from 1 as <count,decades>")->excludes(lambda_opt);
  app.add_option("--k-const", k_const, "Huber truncation constant K")->check(CLI::PositiveNumber);
  app.add_option("--epsilon", epsilon, "Eigenvalue floor of the PSD projection")->check(CLI::PositiveNumber);

  auto* estimate = app.add_subcommand("estimate", "Estimate a precision matrix from a CSV data matrix");
  estimate->add_option("--data", data_path, "CSV data matrix (rows are observations)")->required();
  auto* simulate = app.add_subcommand("simulate", "Write one synthetic dataset with its truth");
  auto* experiment = app.add_subcommand("experiment", "Run a scenario and write results, oracle table and plots");
  auto* check = app.add_subcommand("check-bounds", "Tabulate the deterministic error bounds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    std::optional<EstimatorKind> estimator;
    if (!estimator_name.empty()) {
      estimator = parse_estimator_kind(estimator_name);
      if (!estimator || *estimator == EstimatorKind::GeminiA || *estimator == EstimatorKind::GeminiB)
        throw UsageError("--estimator: unknown estimator '" + estimator_name + "'");
    }
    std::optional<GridSpec> grid;
    if (!grid_text.empty()) grid = parse_grid(grid_text);

    if (estimate->parsed()) {
      EstimateOptions opts;
      opts.data = data_path;
      opts.header = header;
      if (estimator) opts.estimator = *estimator;
      opts.lambda = lambda;
      if (grid) opts.grid = *grid;
      if (k_const) opts.k_const = *k_const;
      if (epsilon) opts.epsilon = *epsilon;
      if (!out.empty()) opts.out = out;
      estimate_command(opts, std::cout);
      return 0;
    }

    Scenario scenario = Scenario::ToeplitzPath;
    if (!scenario_name.empty()) {
      const auto s = parse_scenario(scenario_name);
      if (!s) throw UsageError("--scenario: unknown scenario '" + scenario_name + "'");
      scenario = *s;
    }
    ScenarioConfig cfg = default_config(scenario);
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      std::ostringstream text;
      text << in.rdbuf();
      cfg = parse_config(text.str(), config_path, cfg);
      if (!scenario_name.empty() && cfg.scenario != scenario)
        throw UsageError("--scenario conflicts with the scenario in " + config_path);
    }
    if (paper_scale) apply_paper_scale(cfg);
    if (seed) cfg.seed = *seed;
    if (!out.empty()) cfg.out = out;
    if (replications) cfg.replications = *replications;
    if (estimator) cfg.estimator = *estimator;
    if (lambda) cfg.lambda = lambda;
    if (grid) {
      cfg.grid.count = grid->count;
      cfg.grid.decades = grid->decades;
      cfg.lambda.reset();
    }
    if (k_const) cfg.k_const = *k_const;
    if (epsilon) cfg.epsilon = *epsilon;
    validate(cfg);

    if (simulate->parsed()) {
      simulate_command(cfg, header, std::cout);
    } else if (experiment->parsed()) {
      experiment_command(cfg, resolve_threads(threads), std::cout);
    } else if (check->parsed()) {
      return check_bounds_command(cfg, std::cout) == 0 ? 0 : kExitBoundViolation;
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const wsp::Error& e) {
    std::cerr << "error: numerical failure in " << e.where() << ": " << e.what() << "\n";
    return kExitNumerical;
  }
}
