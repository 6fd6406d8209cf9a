#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wsp/scio.hpp"

namespace wsp::cli {

using nlohmann::json;

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::DiamondSweep: return "diamond_sweep";
    case Scenario::ToeplitzPath: return "toeplitz_path";
    case Scenario::RobustT: return "robust_t";
    case Scenario::Nonparanormal: return "nonparanormal";
    case Scenario::MatrixData: return "matrix_data";
    case Scenario::Custom: return "custom";
  }
  return "?";
}

std::string_view to_string(Distribution d) {
  switch (d) {
    case Distribution::Gaussian: return "gaussian";
    case Distribution::StudentT: return "t";
    case Distribution::Nonparanormal: return "nonparanormal";
  }
  return "?";
}

std::optional<Scenario> parse_scenario(std::string_view name) {
  for (auto s : {Scenario::DiamondSweep, Scenario::ToeplitzPath, Scenario::RobustT, Scenario::Nonparanormal,
                 Scenario::MatrixData, Scenario::Custom}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::vector<double> ScenarioConfig::lambdas() const {
  if (lambda) return {*lambda};
  return lambda_grid(grid.count, grid.decades, grid.lambda_max);
}

double ScenarioConfig::lambda_b_for(std::size_t n) const {
  if (!scale_lambda_b) return lambda_b;
  return lambda_b * std::sqrt(3.0 / static_cast<double>(n));
}

ScenarioConfig default_config(Scenario s) {
  ScenarioConfig c;
  c.scenario = s;
  switch (s) {
    case Scenario::DiamondSweep:
      c.truth = TruthKind::DiamondBlock;
      c.rho.clear();
      // −0.65 … 0.65 in steps of 0.05, built from integers to avoid drift.
      for (int k = -13; k <= 13; ++k) c.rho.push_back(0.05 * k);
      break;
    case Scenario::ToeplitzPath:
      break;
    case Scenario::RobustT:
      c.rho = {0.5};
      c.distribution = Distribution::StudentT;
      c.estimator = EstimatorKind::Huber;
      break;
    case Scenario::Nonparanormal:
      c.rho = {0.5};
      c.truth = TruthKind::CorrelationOfInverseToeplitz;
      c.distribution = Distribution::Nonparanormal;
      c.estimator = EstimatorKind::Spearman;
      break;
    case Scenario::MatrixData:
      c.n = {3};
      c.rho = {0.5};
      c.estimator = EstimatorKind::GeminiA;
      break;
    case Scenario::Custom:
      c.rho = {0.5};
      break;
  }
  return c;
}

void apply_paper_scale(ScenarioConfig& cfg) {
  cfg.p = 100;
  cfg.m = 80;
  cfg.f = 40;
  cfg.n = {cfg.scenario == Scenario::MatrixData ? std::size_t{3} : std::size_t{200}};
}

namespace {

std::size_t line_of(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

/// Line of the first `"key":` in the text, or 1 if absent.
std::size_t key_line(std::string_view text, std::string_view key) {
  const std::string needle = "\"" + std::string(key) + "\"";
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string_view::npos) {
    std::size_t k = pos + needle.size();
    while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
    if (k < text.size() && text[k] == ':') return line_of(text, pos);
    pos += needle.size();
  }
  return 1;
}

class Reader {
 public:
  Reader(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(std::string_view key, const std::string& what) const {
    throw UsageError(source_ + ":" + std::to_string(key_line(text_, key)) + ": " + std::string(key) + ": " + what);
  }

  double number(const json& v, std::string_view key) const {
    if (!v.is_number()) fail(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(key, "expected a finite number");
    return d;
  }

  double positive(const json& v, std::string_view key) const {
    const double d = number(v, key);
    if (!(d > 0.0)) fail(key, "must be positive");
    return d;
  }

  std::size_t count(const json& v, std::string_view key) const {
    if (!v.is_number_integer() || v.get<long long>() < 1) fail(key, "expected a positive integer");
    return static_cast<std::size_t>(v.get<long long>());
  }

  std::string string(const json& v, std::string_view key) const {
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  template <class F>
  auto list(const json& v, std::string_view key, F&& each) const {
    using T = decltype(each(v, key));
    std::vector<T> out;
    if (v.is_array()) {
      if (v.empty()) fail(key, "list must not be empty");
      for (const auto& e : v) out.push_back(each(e, key));
    } else {
      out.push_back(each(v, key));
    }
    return out;
  }

 private:
  std::string_view text_;
  std::string source_;
};

}  // namespace

ScenarioConfig parse_config(std::string_view text, const std::string& source, std::optional<ScenarioConfig> base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(source + ":" + std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)) +
                     ": invalid JSON: " + e.what());
  }
  if (!doc.is_object()) throw UsageError(source + ":1: top level must be a JSON object");
  const Reader r(text, source);

  ScenarioConfig cfg;
  if (auto it = doc.find("scenario"); it != doc.end()) {
    const auto s = parse_scenario(r.string(*it, "scenario"));
    if (!s) r.fail("scenario", "unknown scenario '" + it->get<std::string>() + "'");
    cfg = default_config(*s);
  } else if (base) {
    cfg = *base;
  }

  for (const auto& [key, v] : doc.items()) {
    if (key == "scenario") continue;
    if (key == "n") {
      cfg.n = r.list(v, key, [&](const json& e, std::string_view k) { return r.count(e, k); });
    } else if (key == "p") {
      cfg.p = r.count(v, key);
    } else if (key == "m") {
      cfg.m = r.count(v, key);
    } else if (key == "f") {
      cfg.f = r.count(v, key);
    } else if (key == "rho") {
      cfg.rho = r.list(v, key, [&](const json& e, std::string_view k) { return r.number(e, k); });
    } else if (key == "truth") {
      const auto name = r.string(v, key);
      if (name == "toeplitz") cfg.truth = TruthKind::Toeplitz;
      else if (name == "diamond") cfg.truth = TruthKind::DiamondBlock;
      else if (name == "correlation_of_inverse_toeplitz") cfg.truth = TruthKind::CorrelationOfInverseToeplitz;
      else r.fail(key, "unknown truth '" + name + "'");
    } else if (key == "distribution") {
      const auto name = r.string(v, key);
      if (name == "gaussian") cfg.distribution = Distribution::Gaussian;
      else if (name == "t") cfg.distribution = Distribution::StudentT;
      else if (name == "nonparanormal") cfg.distribution = Distribution::Nonparanormal;
      else r.fail(key, "unknown distribution '" + name + "'");
    } else if (key == "nu") {
      cfg.nu = r.number(v, key);
      if (!(cfg.nu > 2.0)) r.fail(key, "must exceed 2");
    } else if (key == "estimator") {
      const auto name = r.string(v, key);
      const auto kind = parse_estimator_kind(name);
      if (!kind || *kind == EstimatorKind::GeminiB) r.fail(key, "unknown estimator '" + name + "'");
      cfg.estimator = *kind;
    } else if (key == "k_const") {
      cfg.k_const = r.positive(v, key);
    } else if (key == "epsilon") {
      cfg.epsilon = r.positive(v, key);
    } else if (key == "mu_g0") {
      cfg.mu_g0 = r.number(v, key);
    } else if (key == "sigma_g0") {
      cfg.sigma_g0 = r.positive(v, key);
    } else if (key == "q") {
      cfg.q = r.list(v, key, [&](const json& e, std::string_view k) {
        const double q = r.number(e, k);
        if (q < 0.0 || q >= 1.0) r.fail(k, "q must lie in [0, 1)");
        return q;
      });
    } else if (key == "grid") {
      if (!v.is_object()) r.fail(key, "expected an object with count, decades, lambda_max");
      for (const auto& [gk, gv] : v.items()) {
        if (gk == "count") cfg.grid.count = r.count(gv, gk);
        else if (gk == "decades") cfg.grid.decades = r.positive(gv, gk);
        else if (gk == "lambda_max") cfg.grid.lambda_max = r.positive(gv, gk);
        else r.fail(gk, "unknown grid key");
      }
      cfg.lambda.reset();
    } else if (key == "lambda") {
      cfg.lambda = r.positive(v, key);
    } else if (key == "lambda_b") {
      cfg.lambda_b = r.positive(v, key);
    } else if (key == "scale_lambda_b") {
      if (!v.is_boolean()) r.fail(key, "expected true or false");
      cfg.scale_lambda_b = v.get<bool>();
    } else if (key == "rho_b") {
      cfg.rho_b = r.number(v, key);
    } else if (key == "replications") {
      cfg.replications = r.count(v, key);
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) r.fail(key, "expected a non-negative integer");
      cfg.seed = v.get<std::uint64_t>();
    } else if (key == "out") {
      cfg.out = r.string(v, key);
    } else if (key == "exact_sigma") {
      if (!v.is_boolean()) r.fail(key, "expected true or false");
      cfg.exact_sigma = v.get<bool>();
    } else {
      r.fail(key, "unknown key");
    }
  }
  try {
    validate(cfg);
  } catch (const UsageError& e) {
    throw UsageError(source + ": " + e.what());
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError(path.string() + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

void validate(const ScenarioConfig& cfg) {
  if (cfg.n.empty() || cfg.rho.empty() || cfg.q.empty()) throw UsageError("n, rho and q must be non-empty");
  for (auto n : cfg.n)
    if (n < 1) throw UsageError("n must be positive");
  if (cfg.p < 1 || cfg.m < 1 || cfg.f < 1) throw UsageError("dimensions must be positive");
  if (cfg.replications < 1) throw UsageError("replications must be at least 1");
  if (cfg.grid.count < 1) throw UsageError("grid count must be at least 1");
  const bool needs_p2 = cfg.estimator == EstimatorKind::Huber && cfg.scenario != Scenario::MatrixData;
  if (needs_p2 && cfg.p < 2) throw UsageError("the huber estimator needs p >= 2");
  for (double rho : cfg.rho) {
    if (!(std::abs(rho) < 1.0)) throw UsageError("rho must lie in (-1, 1)");
  }
  if (!(std::abs(cfg.rho_b) < 1.0)) throw UsageError("rho_b must lie in (-1, 1)");
  const bool gemini = cfg.estimator == EstimatorKind::GeminiA;
  if (gemini != (cfg.scenario == Scenario::MatrixData)) {
    throw UsageError("the gemini_A estimator is used by, and only by, the matrix_data scenario");
  }
}

}  // namespace wsp::cli
