#pragma once

#include <string>
#include <vector>

#include "sdiflow/integrator.hpp"

namespace sdiflow {

struct EnsembleConfig {
  int n_paths = 2;
  std::uint64_t base_seed = 0;
  InitialState init;
  int n_threads = 0;  // 0 = hardware concurrency
};

/// Per-record-time sample statistics over surviving paths. Standard errors
/// are sample std / sqrt(n). `ergodic_gap` is the running time-average of the
/// objective gap normalized by (t - t0); `jensen_gap` is F(x_bar(t)) - min F
/// for the same normalization (Jensen: jensen_gap <= ergodic_gap up to noise).
struct EnsembleStats {
  std::vector<double> times;
  std::vector<double> mean_gap, se_gap;
  std::vector<double> mean_dist_sq, se_dist_sq;
  std::vector<double> ergodic_gap, se_ergodic_gap;
  std::vector<double> jensen_gap, se_jensen_gap;
  std::vector<double> mean_lyapunov;             // empty when not recorded
  std::vector<double> mean_dist_to_viscosity_sq; // empty when not recorded
  int n_paths = 0;
  int n_diverged = 0;
};

struct EnsembleResult {
  EnsembleStats stats;
  std::vector<TrajectoryRecord> records;  // surviving paths, in path-index order
  std::vector<std::pair<int, std::string>> divergences;  // (path index, reason)
};

/// Runs n_paths independent paths (path i seeded from base_seed ^ hash(i)) and
/// aggregates by a sequential reduce in path-index order, so the result does
/// not depend on thread count or completion order. Diverged paths are excluded
/// from statistics and flagged.
EnsembleResult run_ensemble(const ProblemSpec& problem, const TikhonovSchedule& tik,
                            const NoiseSchedule& noise, const IntegratorConfig& cfg,
                            const EnsembleConfig& ens);

/// Trapezoidal time-average of the state over [t0, t_i], normalized by
/// (t_i - t0); the value at the first record time is the state itself.
Vec ergodic_average(const TrajectoryRecord& record, std::size_t t_index);

/// Fraction of paths whose tail (last quarter of record times) stays within
/// delta of target. A desk-scale proxy for almost-sure strong convergence.
double as_convergence_diagnostic(const std::vector<TrajectoryRecord>& records, const Vec& target,
                                 double delta);

}  // namespace sdiflow
