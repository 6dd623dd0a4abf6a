#include "sdiflow/schedules.hpp"

#include <cmath>

namespace sdiflow {

TikhonovSchedule TikhonovSchedule::make_off(double t0) {
  TikhonovSchedule s;
  s.kind = Kind::off;
  s.t0 = t0;
  return s;
}

TikhonovSchedule TikhonovSchedule::make_power(double c, double r, double t0) {
  require(c > 0.0, "tikhonov: c must be > 0");
  require(r > 0.0 && r <= 1.0, "tikhonov: r must lie in (0, 1]");
  require(t0 > 0.0, "tikhonov: t0 must be > 0");
  TikhonovSchedule s;
  s.kind = Kind::power;
  s.c = c;
  s.r = r;
  s.t0 = t0;
  return s;
}

double TikhonovSchedule::epsilon(double t) const {
  require(t >= t0, "tikhonov: t must be >= t0");
  if (kind == Kind::off) return 0.0;
  return c * std::pow(t, -r);
}

NoiseSchedule NoiseSchedule::make_constant(double sigma_star, double t0, double state_coupling) {
  require(sigma_star >= 0.0, "noise: sigma_star must be >= 0");
  require(state_coupling >= 0.0 && state_coupling <= 1.0,
          "noise: state_coupling must lie in [0, 1]");
  NoiseSchedule s;
  s.kind = Kind::constant;
  s.sigma_star = sigma_star;
  s.t0 = t0;
  s.state_coupling = state_coupling;
  return s;
}

NoiseSchedule NoiseSchedule::make_power(double sigma_star, double alpha, double t0,
                                        double state_coupling) {
  require(sigma_star >= 0.0, "noise: sigma_star must be >= 0");
  require(alpha >= 0.0, "noise: alpha must be >= 0");
  require(t0 > 0.0, "noise: t0 must be > 0");
  require(state_coupling >= 0.0 && state_coupling <= 1.0,
          "noise: state_coupling must lie in [0, 1]");
  NoiseSchedule s;
  s.kind = Kind::power;
  s.sigma_star = sigma_star;
  s.alpha = alpha;
  s.t0 = t0;
  s.state_coupling = state_coupling;
  return s;
}

NoiseSchedule NoiseSchedule::make_zero(double t0) { return make_constant(0.0, t0); }

double NoiseSchedule::sigma_inf(double t) const {
  require(t >= t0, "noise: t must be >= t0");
  if (kind == Kind::constant) return sigma_star;
  return sigma_star * std::pow(t / t0, -0.5 * alpha);
}

double NoiseSchedule::lipschitz_bound() const {
  // phi(x) = 1/(1+|x|^2) has Lipschitz constant 3*sqrt(3)/8.
  return state_coupling * sigma_star * (3.0 * std::sqrt(3.0) / 8.0);
}

bool NoiseSchedule::square_integrable() const {
  if (sigma_star == 0.0) return true;
  return kind == Kind::power && alpha > 1.0;
}

void NoiseSchedule::apply_into(double t, const Vec& x, const Vec& dW, Vec& out) const {
  require_dim(dW, x.size(), "apply_sigma");
  const double s = sigma_inf(t) / std::sqrt(static_cast<double>(x.size()));
  double amp = s;
  if (state_coupling > 0.0) {
    const double phi = 1.0 / (1.0 + x.squaredNorm());
    amp = s * ((1.0 - state_coupling) + state_coupling * phi);
  }
  out = amp * dW;
}

Vec NoiseSchedule::apply(double t, const Vec& x, const Vec& dW) const {
  Vec out(x.size());
  apply_into(t, x, dW, out);
  return out;
}

AdmissibilityReport check_admissibility(const TikhonovSchedule& tik, const NoiseSchedule& noise,
                                        const ProblemSpec& problem) {
  AdmissibilityReport rep;
  rep.p = problem.regularity.eb_exponent;
  require(rep.p >= 1.0, "check_admissibility: problem must carry an error-bound exponent p >= 1");
  rep.strict_threshold = 2.0 * rep.p / (2.0 * rep.p + 1.0);
  rep.noise_square_integrable = noise.square_integrable();

  if (tik.is_off()) {
    rep.t1 = true;   // eps == 0
    rep.t2 = false;  // integral of zero is finite
    rep.t3 = true;   // integrand vanishes
    rep.r = 0.0;
    rep.strict_tuning = false;
    return rep;
  }
  rep.r = tik.r;
  rep.t1 = tik.r > 0.0;
  rep.t2 = tik.r <= 1.0;
  rep.strict_tuning = tik.r > rep.strict_threshold;
  // Sufficient condition of the explicit-tuning result: r + r/(2p) > 1.
  rep.t3 = tik.r + tik.r / (2.0 * rep.p) > 1.0;
  return rep;
}

double t3_integral_diagnostic(const TikhonovSchedule& tik, const ProblemSpec& problem,
                              double t_max, int n_grid) {
  require(!tik.is_off(), "t3_integral_diagnostic: schedule is off");
  require(t_max > tik.t0, "t3_integral_diagnostic: t_max must exceed t0");
  const double xstar2 = problem.solution.min_norm_point.squaredNorm();
  const double lt0 = std::log(tik.t0), lt1 = std::log(t_max);
  double total = 0.0, prev_t = tik.t0, prev_v = 0.0;
  for (int i = 0; i <= n_grid; ++i) {
    const double t = std::exp(lt0 + (lt1 - lt0) * i / n_grid);
    const double eps = tik.epsilon(t);
    const Vec xe = tikhonov_point(problem, eps).point;
    const double v = eps * (xstar2 - xe.squaredNorm());
    if (i > 0) total += 0.5 * (v + prev_v) * (t - prev_t);
    prev_t = t;
    prev_v = v;
  }
  return total;
}

}  // namespace sdiflow
