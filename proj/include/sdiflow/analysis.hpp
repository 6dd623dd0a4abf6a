#pragma once

#include <string>
#include <vector>

#include "sdiflow/common.hpp"
#include "sdiflow/problems.hpp"
#include "sdiflow/schedules.hpp"

namespace sdiflow {

struct RateFit {
  double window_lo = 0.0, window_hi = 0.0;
  double fitted = 0.0;
  double stderr_ = 0.0;
  double predicted = kNaN;   // NaN when no prediction applies
  double tolerance = 0.15;
  bool has_prediction = false;
  bool pass = false;         // |fitted - predicted| <= tolerance
  int n_points = 0;
};

/// OLS slope of log(value) against log(t) over the window [lo, hi].
/// Requires >= 8 points with positive values; nonpositive values signal the
/// observable hit its noise floor and raise FitError.
RateFit fit_rate(const std::vector<double>& times, const std::vector<double>& values, double lo,
                 double hi, double predicted = kNaN, double tolerance = 0.15);

/// OLS slope of log(value) against t (semi-log), for exponential decays.
RateFit fit_exponential_rate(const std::vector<double>& times, const std::vector<double>& values,
                             double lo, double hi, double predicted = kNaN,
                             double tolerance = 0.15);

enum class Observable { gap, ergodic_gap, dist_sq, dist_to_viscosity_sq, lyapunov };

Observable observable_from_string(const std::string& name);
std::string to_string(Observable obs);

/// Predicted decay exponent (power of t for the dominant term of the known
/// upper bound), or an explanatory note when the configuration admits none.
struct RatePrediction {
  bool has_exponent = false;
  double exponent = 0.0;
  std::string note;
};

RatePrediction theoretical_rate(const ProblemSpec& problem, const TikhonovSchedule& tik,
                                const NoiseSchedule& noise, Observable obs);

/// R(t) = exp(-t^(1-r)/(1-r)) * integral_{t1}^{t} exp(s^(1-r)/(1-r)) sigma_inf^2(s) ds,
/// evaluated in the log domain (every exponentiated argument is <= 0).
double compute_R(double t, double r, double t1, const NoiseSchedule& noise);

struct DawsonCheck {
  double value = 0.0;  // D_{a,b}(t) = exp(-a t^b) * integral_0^t exp(a s^b) ds
  double bound = 0.0;  // (2/(a b)) t^(1-b)
};

DawsonCheck dawson_bound_check(double a, double b, double t);

struct TikhonovCurvePoint {
  double epsilon = 0.0;
  double norm_x_eps = 0.0;
  double dist_to_xstar = 0.0;
};

struct TikhonovCurveStudy {
  std::vector<TikhonovCurvePoint> points;
  bool degenerate = false;   // curve sits on x* to machine precision
  bool browder_ok = false;   // |x_eps| <= |x*| + 1e-8 on the whole grid
  double fitted_slope = kNaN;
  double slope_threshold = 0.0;  // 1/(2p) - 0.05
  bool pass = false;
};

/// |x_eps| and |x_eps - x*| over a decreasing grid in (0, 1], with the log-log
/// slope of the distance. The known bound is from above, so the fitted decay
/// must be at least 1/(2p) fast.
TikhonovCurveStudy tikhonov_curve_study(const ProblemSpec& problem,
                                        const std::vector<double>& eps_grid);

}  // namespace sdiflow
