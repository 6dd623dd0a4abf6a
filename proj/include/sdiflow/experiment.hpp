#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "sdiflow/config.hpp"

namespace sdiflow {

/// CLI-level overrides applied on top of a parsed config.
struct RunOptions {
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;  // 0 = hardware concurrency
};

/// Exit-code contract shared by all subcommands:
/// 0 = all verdicts pass and no divergences, 2 = verdict failures or
/// divergences, 1 = configuration or runtime error.
inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitVerdictFail = 2;

/// Formats a double with 17 significant digits (shortest round-trippable form
/// is not needed; fixed width keeps outputs byte-identical across runs).
std::string format_double(double v);

/// Runs the ensemble described by cfg, writes ensemble.csv, rates.csv and
/// summary.json into the output directory, and returns the exit code.
int run_simulate(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& log,
                 std::ostream& err);

/// Cartesian sweep over one parameter. Writes one subdirectory per value plus
/// sweep_summary.csv. Continues past per-point failures and records them.
int run_sweep(const ExperimentConfig& cfg, const std::string& param,
              const std::vector<std::string>& values, const RunOptions& opts, std::ostream& log,
              std::ostream& err);

/// Computes the viscosity curve on the configured grid and writes
/// tikhonov_curve.csv plus summary.json with the slope verdict.
int run_tikhonov_curve(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& log,
                       std::ostream& err);

}  // namespace sdiflow
