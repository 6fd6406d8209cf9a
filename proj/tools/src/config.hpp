#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wsp/covariance.hpp"
#include "wsp/simulate.hpp"

namespace wsp::cli {

/// Configuration or input problem; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scenario { DiamondSweep, ToeplitzPath, RobustT, Nonparanormal, MatrixData, Custom };
enum class Distribution { Gaussian, StudentT, Nonparanormal };

std::string_view to_string(Scenario s);
std::string_view to_string(Distribution d);

struct GridSpec {
  std::size_t count = 30;
  double decades = 2.0;
  double lambda_max = 1.0;
};

struct ScenarioConfig {
  Scenario scenario = Scenario::ToeplitzPath;
  std::vector<std::size_t> n{200};
  std::size_t p = 40;
  std::size_t m = 16;
  std::size_t f = 8;
  std::vector<double> rho{0.2, 0.5, 0.8};
  TruthKind truth = TruthKind::Toeplitz;
  Distribution distribution = Distribution::Gaussian;
  double nu = 3.5;
  EstimatorKind estimator = EstimatorKind::Sample;
  double k_const = kDefaultHuberK;
  double epsilon = kDefaultProjectionFloor;
  double mu_g0 = 0.05;
  double sigma_g0 = 0.4;
  std::vector<double> q{0.5};
  GridSpec grid;
  std::optional<double> lambda;  // single λ instead of a grid
  /// B-factor penalty at n = 3. With scale_lambda_b it shrinks as (3/n)^{1/2}.
  double lambda_b = 0.15;
  bool scale_lambda_b = true;
  /// Toeplitz ρ behind the row factor B in matrix_data; `rho` drives A.
  double rho_b = 0.2;
  std::size_t replications = 20;
  std::uint64_t seed = 1;
  std::filesystem::path out = "wsp-out";
  /// check-bounds: use Σ̂ = Σ instead of sampling data.
  bool exact_sigma = true;

  std::vector<double> lambdas() const;
  double lambda_b_for(std::size_t n) const;
};

/// Desk-scale defaults for a scenario.
ScenarioConfig default_config(Scenario s);

/// Applies the full-size dimensions.
void apply_paper_scale(ScenarioConfig& cfg);

/// Parses JSON text over `base`; unknown keys and bad values raise
/// UsageError with the line of the offending key.
ScenarioConfig parse_config(std::string_view text, const std::string& source,
                            std::optional<ScenarioConfig> base = std::nullopt);

ScenarioConfig load_config(const std::filesystem::path& path);

std::optional<Scenario> parse_scenario(std::string_view name);

/// Checks invariants (positive dimensions, replications ≥ 1, ...).
void validate(const ScenarioConfig& cfg);

}  // namespace wsp::cli
