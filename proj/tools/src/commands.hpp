#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"

namespace wsp::cli {

struct EstimateOptions {
  std::filesystem::path data;
  bool header = false;
  EstimatorKind estimator = EstimatorKind::Sample;
  std::optional<double> lambda;
  GridSpec grid;
  double k_const = kDefaultHuberK;
  double epsilon = kDefaultProjectionFloor;
  std::filesystem::path out = "wsp-out";
};

/// Parses "count,decades".
GridSpec parse_grid(const std::string& text);

/// Writes precision.csv (or precision_NNN.csv per grid point) and
/// precision.json into opts.out.
void estimate_command(const EstimateOptions& opts, std::ostream& log);

/// One dataset (replication 0, first n and ρ) with its truth.
void simulate_command(const ScenarioConfig& cfg, bool header, std::ostream& log);

/// Runs the scenario and writes all outputs into cfg.out.
void experiment_command(const ScenarioConfig& cfg, unsigned threads, std::ostream& log);

/// Prints the hypothesis/inequality table and writes bounds.csv.
/// Returns the number of rows whose hypotheses held but a bound failed.
int check_bounds_command(const ScenarioConfig& cfg, std::ostream& log);

}  // namespace wsp::cli
