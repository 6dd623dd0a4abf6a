#include "sdiflow/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <thread>

namespace sdiflow {

namespace {

struct MeanSE {
  double mean = 0.0, se = 0.0;
};

// Two-pass mean and standard error, accumulated in index order.
MeanSE mean_se(const std::vector<double>& v) {
  MeanSE r;
  const std::size_t n = v.size();
  if (n == 0) return r;
  double sum = 0.0;
  for (double x : v) sum += x;
  r.mean = sum / static_cast<double>(n);
  if (n >= 2) {
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
  }
  return r;
}

}  // namespace

Vec ergodic_average(const TrajectoryRecord& record, std::size_t t_index) {
  require(t_index < record.times.size(), "ergodic_average: t_index out of range");
  const double span = record.times[t_index] - record.times.front();
  if (span <= 0.0) return record.states[t_index];
  return record.state_integrals[t_index] / span;
}

double as_convergence_diagnostic(const std::vector<TrajectoryRecord>& records, const Vec& target,
                                 double delta) {
  require(!records.empty(), "as_convergence_diagnostic: need at least one record");
  require(delta > 0.0, "as_convergence_diagnostic: delta must be > 0");
  int hits = 0;
  for (const TrajectoryRecord& rec : records) {
    const std::size_t n = rec.times.size();
    const std::size_t start = n - std::max<std::size_t>(1, n / 4);
    bool inside = true;
    for (std::size_t i = start; i < n; ++i) {
      if ((rec.states[i] - target).norm() > delta) {
        inside = false;
        break;
      }
    }
    if (inside) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

EnsembleResult run_ensemble(const ProblemSpec& problem, const TikhonovSchedule& tik,
                            const NoiseSchedule& noise, const IntegratorConfig& cfg,
                            const EnsembleConfig& ens) {
  require(ens.n_paths >= 2, "run_ensemble: n_paths must be >= 2");

  const int n = ens.n_paths;
  std::vector<std::optional<TrajectoryRecord>> slots(n);
  std::vector<std::string> failures(n);

  int n_threads = ens.n_threads > 0 ? ens.n_threads
                                    : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, n));

  auto worker = [&](int first, int stride) {
    for (int i = first; i < n; i += stride) {
      try {
        slots[i] = simulate_path(problem, tik, noise, cfg, ens.init,
                                 path_seed(ens.base_seed, static_cast<std::uint64_t>(i)));
      } catch (const DivergenceError& e) {
        failures[i] = e.what();
      }
    }
  };
  if (n_threads == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker, t, n_threads);
    for (std::thread& th : pool) th.join();
  }

  EnsembleResult result;
  for (int i = 0; i < n; ++i) {
    if (slots[i].has_value())
      result.records.push_back(std::move(*slots[i]));
    else
      result.divergences.emplace_back(i, failures[i]);
  }
  result.stats.n_paths = static_cast<int>(result.records.size());
  result.stats.n_diverged = static_cast<int>(result.divergences.size());
  require(!result.records.empty(), "run_ensemble: every path diverged");

  const TrajectoryRecord& first = result.records.front();
  const std::size_t n_times = first.times.size();
  const bool has_viscosity = !first.lyapunov.empty();
  const double min_F = problem.solution.min_value;

  EnsembleStats& stats = result.stats;
  stats.times = first.times;
  std::vector<double> buf_gap, buf_dist, buf_erg, buf_jensen, buf_lyap, buf_visc;
  for (std::size_t ti = 0; ti < n_times; ++ti) {
    buf_gap.clear();
    buf_dist.clear();
    buf_erg.clear();
    buf_jensen.clear();
    buf_lyap.clear();
    buf_visc.clear();
    const double span = stats.times[ti] - stats.times.front();
    for (const TrajectoryRecord& rec : result.records) {
      buf_gap.push_back(rec.gap[ti]);
      buf_dist.push_back(rec.dist_to_min_norm_sq[ti]);
      const double erg = span > 0.0 ? rec.gap_integrals[ti] / span : rec.gap[ti];
      buf_erg.push_back(erg);
      const Vec xbar = span > 0.0 ? Vec(rec.state_integrals[ti] / span) : rec.states[ti];
      buf_jensen.push_back(eval_F(problem, xbar) - min_F);
      if (has_viscosity) {
        buf_lyap.push_back(rec.lyapunov[ti]);
        buf_visc.push_back(rec.dist_to_viscosity_sq[ti]);
      }
    }
    const MeanSE g = mean_se(buf_gap), d = mean_se(buf_dist), e = mean_se(buf_erg),
                 j = mean_se(buf_jensen);
    stats.mean_gap.push_back(g.mean);
    stats.se_gap.push_back(g.se);
    stats.mean_dist_sq.push_back(d.mean);
    stats.se_dist_sq.push_back(d.se);
    stats.ergodic_gap.push_back(e.mean);
    stats.se_ergodic_gap.push_back(e.se);
    stats.jensen_gap.push_back(j.mean);
    stats.se_jensen_gap.push_back(j.se);
    if (has_viscosity) {
      stats.mean_lyapunov.push_back(mean_se(buf_lyap).mean);
      stats.mean_dist_to_viscosity_sq.push_back(mean_se(buf_visc).mean);
    }
  }
  return result;
}

}  // namespace sdiflow
