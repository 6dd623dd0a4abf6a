#include "sdiflow/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace sdiflow {

namespace {

constexpr double kDivergenceGuard = 1e12;

void validate(const ProblemSpec& problem, const IntegratorConfig& cfg,
              const TikhonovSchedule& tik, const NoiseSchedule& noise) {
  require(cfg.h > 0.0, "integrator: h must be > 0");
  require(cfg.t0 > 0.0, "integrator: t0 must be > 0");
  require(cfg.horizon_T > cfg.t0, "integrator: horizon_T must exceed t0");
  require(tik.t0 <= cfg.t0, "integrator: tikhonov schedule starts after t0");
  require(noise.t0 <= cfg.t0, "integrator: noise schedule starts after t0");
  const double L = problem.smooth.lipschitz_grad;
  require(L == 0.0 || cfg.h <= 1.0 / L * (1.0 + 1e-12),
          "integrator: h must satisfy h <= 1/L for the explicit smooth step");
  if (cfg.scheme == Scheme::yosida_em)
    require(cfg.lambda > 0.0, "integrator: yosida_em needs lambda > 0");
  double prev = -kInf;
  for (double t : cfg.record_times) {
    require(t >= cfg.t0 && t <= cfg.horizon_T, "integrator: record time outside [t0, T]");
    require(t > prev, "integrator: record_times must be strictly increasing");
    prev = t;
  }
}

void check_finite(const Vec& x, double t) {
  const double n2 = x.squaredNorm();
  if (!std::isfinite(n2) || n2 > kDivergenceGuard * kDivergenceGuard)
    throw DivergenceError(t, std::sqrt(n2));
}

}  // namespace

std::vector<double> log_spaced_times(double t0, double T, int n) {
  require(t0 > 0.0 && T > t0, "log_spaced_times: need 0 < t0 < T");
  require(n >= 2, "log_spaced_times: need at least two points");
  std::vector<double> out(n);
  const double l0 = std::log(t0), l1 = std::log(T);
  for (int i = 0; i < n; ++i) out[i] = std::exp(l0 + (l1 - l0) * i / (n - 1));
  out.front() = t0;
  out.back() = T;
  return out;
}

InitialState InitialState::constant(const Vec& x0) {
  InitialState s;
  s.kind = Kind::constant;
  s.value = x0;
  return s;
}

InitialState InitialState::gaussian(const Vec& mean, double scale) {
  require(scale >= 0.0, "initial state: scale must be >= 0");
  InitialState s;
  s.kind = Kind::gaussian;
  s.value = mean;
  s.scale = scale;
  return s;
}

Vec step_prox_em(const Vec& x, double t, const IntegratorConfig& cfg, const ProblemSpec& problem,
                 const TikhonovSchedule& tik, const NoiseSchedule& noise, RandomStream& rng) {
  require_dim(x, problem.dim, "step_prox_em");
  require(t >= cfg.t0 && t < cfg.horizon_T, "step_prox_em: t must lie in [t0, T)");
  const double eps = tik.epsilon(t);
  Vec grad(problem.dim), dW(problem.dim), noise_term(problem.dim);
  if (problem.smooth.gradient)
    problem.smooth.gradient(x, grad);
  else
    grad.setZero();
  brownian_increment_into(cfg.h, rng, dW);
  noise.apply_into(t, x, dW, noise_term);
  const double shrink = 1.0 / (1.0 + cfg.h * eps);
  Vec y = (x - cfg.h * grad + noise_term) * shrink;
  Vec out(problem.dim);
  problem.nonsmooth.prox(y, cfg.h * shrink, out);
  check_finite(out, t + cfg.h);
  return out;
}

Vec step_yosida_em(const Vec& x, double t, const IntegratorConfig& cfg,
                   const ProblemSpec& problem, const TikhonovSchedule& tik,
                   const NoiseSchedule& noise, RandomStream& rng) {
  require_dim(x, problem.dim, "step_yosida_em");
  require(cfg.lambda > 0.0, "step_yosida_em: lambda must be > 0");
  const double eps = tik.epsilon(t);
  Vec grad(problem.dim), dW(problem.dim), noise_term(problem.dim), prox(problem.dim);
  if (problem.smooth.gradient)
    problem.smooth.gradient(x, grad);
  else
    grad.setZero();
  problem.nonsmooth.prox(x, cfg.lambda, prox);
  brownian_increment_into(cfg.h, rng, dW);
  noise.apply_into(t, x, dW, noise_term);
  Vec out = x - cfg.h * (grad + (x - prox) / cfg.lambda + eps * x) + noise_term;
  check_finite(out, t + cfg.h);
  return out;
}

double lyapunov_E(const ProblemSpec& problem, const TikhonovSchedule& tik, double t,
                  const Vec& x) {
  require(problem.nonsmooth.zero, "lyapunov_E: defined for the smooth case (g == 0)");
  require(tik.kind == TikhonovSchedule::Kind::power, "lyapunov_E: needs a power schedule");
  const double eps = tik.epsilon(t);
  const TikhonovPoint tp = tikhonov_point(problem, eps);
  const double f_eps_x = eval_f(problem, x) + 0.5 * eps * x.squaredNorm();
  return f_eps_x - tp.objective_value + 0.5 * eps * (x - tp.point).squaredNorm();
}

TrajectoryRecord simulate_path(const ProblemSpec& problem, const TikhonovSchedule& tik,
                               const NoiseSchedule& noise, const IntegratorConfig& cfg,
                               const InitialState& init, std::uint64_t seed) {
  validate(problem, cfg, tik, noise);
  require_dim(init.value, problem.dim, "simulate_path: initial state");

  const std::vector<double> rec =
      cfg.record_times.empty() ? log_spaced_times(cfg.t0, cfg.horizon_T) : cfg.record_times;
  const long n_steps = std::lround(std::ceil((cfg.horizon_T - cfg.t0) / cfg.h - 1e-9));
  // Snap each record time to the nearest completed step.
  std::vector<long> rec_steps(rec.size());
  for (size_t i = 0; i < rec.size(); ++i)
    rec_steps[i] = std::clamp(std::lround((rec[i] - cfg.t0) / cfg.h), 0L, n_steps);

  const bool want_viscosity = cfg.record_viscosity && problem.nonsmooth.zero &&
                              tik.kind == TikhonovSchedule::Kind::power &&
                              static_cast<bool>(problem.solution.tikhonov_map);

  TrajectoryRecord out;
  out.seed = seed;
  out.times.reserve(rec.size());
  out.states.reserve(rec.size());

  RandomStream rng(seed);
  Vec x = init.value;
  if (init.kind == InitialState::Kind::gaussian) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += init.scale * rng.gaussian();
  }

  const Vec& xstar = problem.solution.min_norm_point;
  const double min_F = problem.solution.min_value;

  Vec state_integral = Vec::Zero(problem.dim);
  double gap_integral = 0.0;
  double gap_prev = eval_F(problem, x) - min_F;

  Vec grad(problem.dim), dW(problem.dim), noise_term(problem.dim), y(problem.dim),
      x_next(problem.dim), prox_buf(problem.dim);
  const double sqrt_h = std::sqrt(cfg.h);
  const bool has_grad = static_cast<bool>(problem.smooth.gradient);

  size_t next_rec = 0;
  for (long k = 0; k <= n_steps; ++k) {
    const double t = cfg.t0 + k * cfg.h;
    while (next_rec < rec_steps.size() && rec_steps[next_rec] == k) {
      out.times.push_back(t);
      out.states.push_back(x);
      out.state_integrals.push_back(state_integral);
      const double gap = eval_F(problem, x) - min_F;
      out.gap.push_back(gap);
      out.gap_integrals.push_back(gap_integral);
      out.dist_to_min_norm_sq.push_back((x - xstar).squaredNorm());
      if (want_viscosity) {
        const double eps = tik.epsilon(t);
        const TikhonovPoint tp = tikhonov_point(problem, eps);
        const double f_eps_x = eval_f(problem, x) + 0.5 * eps * x.squaredNorm();
        out.lyapunov.push_back(f_eps_x - tp.objective_value +
                               0.5 * eps * (x - tp.point).squaredNorm());
        out.dist_to_viscosity_sq.push_back((x - tp.point).squaredNorm());
      }
      ++next_rec;
    }
    if (k == n_steps) break;

    // One step of the chosen scheme, allocation-free.
    const double eps = tik.epsilon(t);
    if (has_grad)
      problem.smooth.gradient(x, grad);
    else
      grad.setZero();
    for (Eigen::Index i = 0; i < dW.size(); ++i) dW[i] = sqrt_h * rng.gaussian();
    noise.apply_into(t, x, dW, noise_term);
    if (cfg.scheme == Scheme::prox_em) {
      const double shrink = 1.0 / (1.0 + cfg.h * eps);
      y = (x - cfg.h * grad + noise_term) * shrink;
      problem.nonsmooth.prox(y, cfg.h * shrink, x_next);
    } else {
      problem.nonsmooth.prox(x, cfg.lambda, prox_buf);
      x_next = x - cfg.h * (grad + (x - prox_buf) / cfg.lambda + eps * x) + noise_term;
    }
    check_finite(x_next, t + cfg.h);

    state_integral += (0.5 * cfg.h) * (x + x_next);
    const double gap_next = eval_F(problem, x_next) - min_F;
    gap_integral += 0.5 * cfg.h * (gap_prev + gap_next);
    gap_prev = gap_next;
    x.swap(x_next);
  }
  return out;
}

}  // namespace sdiflow
