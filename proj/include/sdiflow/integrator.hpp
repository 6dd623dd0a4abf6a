#pragma once

#include <cstdint>
#include <vector>

#include "sdiflow/common.hpp"
#include "sdiflow/problems.hpp"
#include "sdiflow/rng.hpp"
#include "sdiflow/schedules.hpp"

namespace sdiflow {

enum class Scheme { prox_em, yosida_em };

struct IntegratorConfig {
  Scheme scheme = Scheme::prox_em;
  double h = 1e-3;          // uniform step
  double lambda = 1e-2;     // Yosida parameter (yosida_em only)
  double t0 = 1.0;
  double horizon_T = 100.0;
  std::vector<double> record_times;  // strictly increasing, inside [t0, T]
  bool record_viscosity = false;     // also record E(t,X) and |X - x_eps(t)|^2
};

/// 64 log-spaced record times by default; rate fits operate on log t.
std::vector<double> log_spaced_times(double t0, double T, int n = 64);

struct InitialState {
  enum class Kind { constant, gaussian };
  Kind kind = Kind::constant;
  Vec value;     // the vector itself, or the Gaussian mean
  double scale = 1.0;

  static InitialState constant(const Vec& x0);
  static InitialState gaussian(const Vec& mean, double scale);
};

/// One sample path, observed on the record grid. All lists share the length
/// of `times`. Running integrals are fine-grid trapezoid sums from t0, kept
/// so ergodic averages do not depend on the coarse record grid.
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<Vec> state_integrals;          // integral of X over [t0, t_i]
  std::vector<double> gap;                   // F(X(t_i)) - min F
  std::vector<double> gap_integrals;         // integral of the gap over [t0, t_i]
  std::vector<double> dist_to_min_norm_sq;   // |X(t_i) - x*|^2
  std::vector<double> lyapunov;              // E(t_i, X(t_i)); empty if not recorded
  std::vector<double> dist_to_viscosity_sq;  // |X(t_i) - x_eps(t_i)|^2; empty if not recorded
  std::uint64_t seed = 0;
};

/// One step of the splitting scheme: explicit smooth drift, implicit Tikhonov
/// factor, backward (prox) nonsmooth step with consistently rescaled step size,
/// explicit noise.
Vec step_prox_em(const Vec& x, double t, const IntegratorConfig& cfg, const ProblemSpec& problem,
                 const TikhonovSchedule& tik, const NoiseSchedule& noise, RandomStream& rng);

/// Fully explicit Euler-Maruyama on the Yosida-regularized single-valued drift.
Vec step_yosida_em(const Vec& x, double t, const IntegratorConfig& cfg,
                   const ProblemSpec& problem, const TikhonovSchedule& tik,
                   const NoiseSchedule& noise, RandomStream& rng);

/// Integrate one path over [t0, T]. Pure function of its arguments; identical
/// seed and configuration reproduce the record bit for bit. Record times snap
/// to the nearest completed step. Throws DivergenceError if |X| exceeds 1e12
/// or turns non-finite.
TrajectoryRecord simulate_path(const ProblemSpec& problem, const TikhonovSchedule& tik,
                               const NoiseSchedule& noise, const IntegratorConfig& cfg,
                               const InitialState& init, std::uint64_t seed);

/// E(t, x) = f_eps(x) - f_eps(x_eps) + (eps/2)|x - x_eps|^2 with eps = eps(t).
/// Requires g == 0, a power schedule, and a tractable viscosity map.
double lyapunov_E(const ProblemSpec& problem, const TikhonovSchedule& tik, double t, const Vec& x);

}  // namespace sdiflow
