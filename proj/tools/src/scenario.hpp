#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "wsp/covariance.hpp"
#include "wsp/theory.hpp"

namespace wsp::cli {

/// One (replication × n × ρ × λ × q) evaluation.
struct ResultRow {
  Scenario scenario = Scenario::ToeplitzPath;
  std::size_t replication = 0;
  std::size_t n = 0;
  double rho = 0.0;
  double lambda = 0.0;
  double q = 0.0;
  EstimatorKind estimator = EstimatorKind::Sample;
  ErrorReport errors;
  /// ‖Σ̂ − Σ‖∞ of the pilot covariance against its population target.
  double sigma_error_inf = 0.0;
  bool hypotheses_hold = false;
  bool bounds_satisfied = false;
  long sweeps = 0;
  bool converged = false;
  double max_kkt_residual = 0.0;
};

struct JobTiming {
  std::size_t replication = 0;
  std::size_t n = 0;
  double rho = 0.0;
  double seconds = 0.0;
};

struct OracleRow {
  std::size_t replication = 0;
  std::size_t n = 0;
  double rho = 0.0;
  NormKind norm = NormKind::Frobenius;
  double lambda = 0.0;
  double error = 0.0;
};

struct ScenarioResult {
  ScenarioConfig config;
  /// Sorted by (n, ρ, replication, λ descending, q).
  std::vector<ResultRow> rows;
  std::vector<JobTiming> timings;
};

/// One synthetic dataset with its population targets.
struct Problem {
  SymMatrix omega;  // precision the estimate is scored against
  SymMatrix sigma;  // population value of the pilot covariance
  DataMatrix data;
};

/// Seed of replication `rep`; independent of n and ρ so that sweeps share
/// common random numbers.
std::uint64_t replication_seed(std::uint64_t seed, std::size_t rep);

/// Builds truth and data for a vector-data scenario.
Problem build_problem(const ScenarioConfig& cfg, std::size_t n, double rho, std::uint64_t seed);

/// Pilot covariance for the configured estimator.
CovarianceEstimate pilot_covariance(const ScenarioConfig& cfg, const DataMatrix& data);

/// Thread count from an explicit value, else WSP_THREADS, else hardware.
unsigned resolve_threads(int requested);

ScenarioResult run_scenario(const ScenarioConfig& cfg, unsigned threads = 1);

/// Per (replication, n, ρ) and norm: the oracle λ over the grid, ties to
/// the larger λ. Uses rows at the first configured q.
std::vector<OracleRow> oracle_rows(const ScenarioResult& result);

std::string results_csv(const ScenarioResult& result);

/// Writes results.csv, timings.csv, oracle.csv, metadata.json and one
/// error_<norm>.svg per norm kind into `dir`.
void write_outputs(const ScenarioResult& result, const std::filesystem::path& dir);

std::string_view norm_name(NormKind kind);
inline constexpr NormKind kAllNorms[] = {NormKind::ElementwiseInf, NormKind::Spectral, NormKind::L1,
                                         NormKind::Frobenius, NormKind::ScaledFrobenius};

}  // namespace wsp::cli
