#include "sdiflow/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "sdiflow/quadrature.hpp"

namespace sdiflow {

namespace {

RateFit ols_fit(const std::vector<double>& xs, const std::vector<double>& ys, double lo, double hi,
                double predicted, double tolerance) {
  RateFit fit;
  fit.window_lo = lo;
  fit.window_hi = hi;
  fit.predicted = predicted;
  fit.tolerance = tolerance;
  fit.has_prediction = std::isfinite(predicted);
  fit.n_points = static_cast<int>(xs.size());

  const std::size_t n = xs.size();
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0) throw FitError("fit_rate: window collapses to a single abscissa");
  fit.fitted = sxy / sxx;
  const double intercept = my - fit.fitted * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double resid = ys[i] - (intercept + fit.fitted * xs[i]);
    rss += resid * resid;
  }
  fit.stderr_ = n > 2 ? std::sqrt(rss / (n - 2) / sxx) : 0.0;
  fit.pass = fit.has_prediction && std::abs(fit.fitted - fit.predicted) <= fit.tolerance;
  return fit;
}

void collect_window(const std::vector<double>& times, const std::vector<double>& values,
                    double lo, double hi, bool log_abscissa, std::vector<double>& xs,
                    std::vector<double>& ys) {
  require(times.size() == values.size(), "fit_rate: times/values size mismatch");
  require(lo < hi, "fit_rate: window must satisfy lo < hi");
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (t < lo || t > hi) continue;
    const double v = values[i];
    if (!(v > 0.0))
      throw FitError("fit_rate: nonpositive value at t=" + std::to_string(t) +
                     " (observable hit noise floor; shrink window)");
    xs.push_back(log_abscissa ? std::log(t) : t);
    ys.push_back(std::log(v));
  }
  if (xs.size() < 8)
    throw FitError("fit_rate: need at least 8 points in window, got " +
                   std::to_string(xs.size()));
}

}  // namespace

RateFit fit_rate(const std::vector<double>& times, const std::vector<double>& values, double lo,
                 double hi, double predicted, double tolerance) {
  std::vector<double> xs, ys;
  collect_window(times, values, lo, hi, /*log_abscissa=*/true, xs, ys);
  return ols_fit(xs, ys, lo, hi, predicted, tolerance);
}

RateFit fit_exponential_rate(const std::vector<double>& times, const std::vector<double>& values,
                             double lo, double hi, double predicted, double tolerance) {
  std::vector<double> xs, ys;
  collect_window(times, values, lo, hi, /*log_abscissa=*/false, xs, ys);
  return ols_fit(xs, ys, lo, hi, predicted, tolerance);
}

Observable observable_from_string(const std::string& name) {
  if (name == "gap") return Observable::gap;
  if (name == "ergodic_gap") return Observable::ergodic_gap;
  if (name == "dist_sq") return Observable::dist_sq;
  if (name == "dist_to_viscosity_sq") return Observable::dist_to_viscosity_sq;
  if (name == "lyapunov") return Observable::lyapunov;
  throw ContractViolation("unknown observable: " + name);
}

std::string to_string(Observable obs) {
  switch (obs) {
    case Observable::gap: return "gap";
    case Observable::ergodic_gap: return "ergodic_gap";
    case Observable::dist_sq: return "dist_sq";
    case Observable::dist_to_viscosity_sq: return "dist_to_viscosity_sq";
    case Observable::lyapunov: return "lyapunov";
  }
  return "?";
}

namespace {

RatePrediction exponent(double e) {
  RatePrediction p;
  p.has_exponent = true;
  p.exponent = e;
  return p;
}

RatePrediction none(const std::string& why) {
  RatePrediction p;
  p.note = why;
  return p;
}

}  // namespace

RatePrediction theoretical_rate(const ProblemSpec& problem, const TikhonovSchedule& tik,
                                const NoiseSchedule& noise, Observable obs) {
  const double mu = problem.smooth.strong_convexity;
  const double p = problem.regularity.eb_exponent;
  const bool noise_l2 = noise.square_integrable();
  const bool zero_noise = noise.is_zero();
  const bool power_noise = noise.kind == NoiseSchedule::Kind::power && !zero_noise;
  const double alpha = noise.alpha;

  if (tik.is_off()) {
    switch (obs) {
      case Observable::ergodic_gap:
        if (noise_l2) return exponent(-1.0);
        return none("bounded noise: ergodic gap settles on the sigma_*^2/2 floor");
      case Observable::gap:
      case Observable::dist_sq:
        if (mu > 0.0) {
          if (zero_noise) return none("deterministic strongly convex decay exp(-2 mu t)");
          if (noise_l2 && power_noise)
            return exponent(-alpha);  // max{exp(-mu t), sigma_inf^2(t)}: power tail dominates
          return none("bounded noise: settles on the sigma_*^2/mu floor");
        }
        return none("pointwise rate known only in the strongly convex case");
      case Observable::dist_to_viscosity_sq:
      case Observable::lyapunov:
        return none("viscosity observables need a Tikhonov schedule");
    }
  }

  // Tikhonov on: smooth-case rate table, eps(t) = c t^(-r).
  if (!problem.nonsmooth.zero)
    return none("Tikhonov rate table covers the smooth case (g == 0) only");
  const double r = tik.r;
  if (r <= 0.0 || r >= 1.0) return none("rate table needs r in (0, 1)");

  if (zero_noise) {
    switch (obs) {
      case Observable::gap: return exponent(-r);
      case Observable::lyapunov: return exponent(-1.0);
      case Observable::dist_to_viscosity_sq: return exponent(-(1.0 - r));
      case Observable::dist_sq:
        return r < p / (p + 1.0) ? exponent(-r / p) : exponent(-(1.0 - r));
      case Observable::ergodic_gap:
        return none("no stated ergodic rate under Tikhonov regularization");
    }
  }

  if (!power_noise || !(alpha > 1.0))
    return none("stochastic Tikhonov rates need sigma_inf^2(t) = O(t^-alpha) with alpha > 1");

  switch (obs) {
    case Observable::gap:
      // O(t^-r + R(t)) with R(t) = O(t^(r-alpha)).
      return exponent(-std::min(r, alpha - r));
    case Observable::lyapunov:
      return exponent(-std::min(1.0, alpha - r));
    case Observable::dist_to_viscosity_sq:
      if (alpha > std::max(2.0 * r, 1.0)) return exponent(-std::min(1.0 - r, alpha - 2.0 * r));
      if (r <= 0.5) return none("converges (r <= 1/2) but no rate: t^r R(t) term dominates");
      return none("no prediction: r > 1/2 and alpha <= max(2r, 1)");
    case Observable::dist_sq:
      if (alpha > std::max(2.0 * r, 1.0))
        return exponent(-std::min({1.0 - r, r / p, alpha - 2.0 * r}));
      if (r <= 0.5) return none("converges (r <= 1/2) but no rate: t^r R(t) term dominates");
      return none("no prediction: r > 1/2 and alpha <= max(2r, 1)");
    case Observable::ergodic_gap:
      return none("no stated ergodic rate under Tikhonov regularization");
  }
  return none("unreachable");
}

double compute_R(double t, double r, double t1, const NoiseSchedule& noise) {
  require(t1 > 0.0 && t > t1, "compute_R: need t > t1 > 0");
  require(r > 0.0 && r < 1.0, "compute_R: need r in (0, 1)");
  auto big_t = [r](double s) { return std::pow(s, 1.0 - r) / (1.0 - r); };
  const double Tt = big_t(t);
  auto integrand = [&](double s) {
    const double e = big_t(s) - Tt;  // <= 0 on [t1, t]
    const double sig = noise.sigma_inf(std::max(s, noise.t0));
    return std::exp(e) * sig * sig;
  };
  return adaptive_gauss_legendre(integrand, t1, t).value;
}

DawsonCheck dawson_bound_check(double a, double b, double t) {
  require(a > 0.0, "dawson_bound_check: a must be > 0");
  require(b > 0.0 && b <= 2.0, "dawson_bound_check: b must lie in (0, 2]");
  require(t > 0.0, "dawson_bound_check: t must be > 0");
  DawsonCheck out;
  const double tb = std::pow(t, b);
  auto integrand = [&](double s) { return std::exp(a * (std::pow(s, b) - tb)); };
  out.value = adaptive_gauss_legendre(integrand, 0.0, t).value;
  out.bound = 2.0 / (a * b) * std::pow(t, 1.0 - b);
  return out;
}

TikhonovCurveStudy tikhonov_curve_study(const ProblemSpec& problem,
                                        const std::vector<double>& eps_grid) {
  require(!eps_grid.empty(), "tikhonov_curve_study: empty grid");
  double prev = kInf;
  for (double e : eps_grid) {
    require(e > 0.0 && e <= 1.0, "tikhonov_curve_study: grid must lie in (0, 1]");
    require(e < prev, "tikhonov_curve_study: grid must be strictly decreasing");
    prev = e;
  }
  TikhonovCurveStudy study;
  study.slope_threshold = 1.0 / (2.0 * problem.regularity.eb_exponent) - 0.05;
  const Vec xstar = min_norm_solution(problem);
  const double xstar_norm = xstar.norm();

  study.browder_ok = true;
  Vec warm = xstar;
  for (double eps : eps_grid) {
    const TikhonovPoint tp = tikhonov_point(problem, eps, warm);
    warm = tp.point;
    TikhonovCurvePoint pt;
    pt.epsilon = eps;
    pt.norm_x_eps = tp.point.norm();
    pt.dist_to_xstar = (tp.point - xstar).norm();
    if (pt.norm_x_eps > xstar_norm + 1e-8) study.browder_ok = false;
    study.points.push_back(pt);
  }

  double max_dist = 0.0;
  for (const auto& pt : study.points) max_dist = std::max(max_dist, pt.dist_to_xstar);
  study.degenerate = max_dist <= 1e-9;
  if (study.degenerate) {
    study.pass = study.browder_ok;
    return study;
  }

  std::vector<double> eps_list, dist_list;
  for (const auto& pt : study.points) {
    if (pt.dist_to_xstar > 0.0) {
      eps_list.push_back(pt.epsilon);
      dist_list.push_back(pt.dist_to_xstar);
    }
  }
  const double lo = *std::min_element(eps_list.begin(), eps_list.end());
  const double hi = *std::max_element(eps_list.begin(), eps_list.end());
  const RateFit fit = fit_rate(eps_list, dist_list, lo, hi);
  study.fitted_slope = fit.fitted;
  study.pass = study.browder_ok && study.fitted_slope >= study.slope_threshold;
  return study;
}

}  // namespace sdiflow
