#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdiflow/analysis.hpp"
#include "sdiflow/integrator.hpp"
#include "sdiflow/montecarlo.hpp"

namespace sdiflow {

using json = nlohmann::json;

/// Parse or validation failure, carrying the offending field path.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), field_path(path) {}
  std::string field_path;
};

struct FitSpec {
  Observable observable = Observable::ergodic_gap;
  std::optional<std::pair<double, double>> window;  // default: [T/31.6, T]
  std::optional<double> tolerance;                  // default: 0.15 noisy, 0.05 deterministic
  std::optional<double> predicted;                  // default: theoretical_rate
  bool semilog = false;                             // fit log(value) vs t instead of log t
};

struct TikhonovCurveConfig {
  std::vector<double> eps_grid;  // decreasing, in (0, 1]
};

struct ExperimentConfig {
  std::string problem_name;
  json problem_params;  // problem-specific sub-table

  TikhonovSchedule tikhonov;
  bool require_strict_tuning = false;
  NoiseSchedule noise;
  IntegratorConfig integrator;
  int n_record = 64;
  EnsembleConfig ensemble;
  std::vector<FitSpec> fits;
  TikhonovCurveConfig curve;
  std::string output_dir = "out";
};

/// Builds the problem named in the config with its parameter sub-table.
ProblemSpec make_problem(const std::string& name, const json& params);

ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config_file(const std::string& path);
json to_json(const ExperimentConfig& cfg);

/// Default rate-fit window: the trailing decade-and-a-half, [T/31.6, T].
std::pair<double, double> default_fit_window(double T);

/// Default tolerance on fitted exponents: 0.15 for stochastic runs, 0.05
/// for deterministic ones.
double default_fit_tolerance(const NoiseSchedule& noise);

}  // namespace sdiflow
