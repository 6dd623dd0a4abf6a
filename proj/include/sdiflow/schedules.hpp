#pragma once

#include <string>

#include "sdiflow/common.hpp"
#include "sdiflow/problems.hpp"

namespace sdiflow {

/// Vanishing regularization weight eps(t) = c * t^(-r) (or identically zero).
struct TikhonovSchedule {
  enum class Kind { off, power };
  Kind kind = Kind::off;
  double c = 1.0;
  double r = 0.9;    // in (0, 1]
  double t0 = 1.0;

  static TikhonovSchedule make_off(double t0 = 1.0);
  static TikhonovSchedule make_power(double c, double r, double t0 = 1.0);

  double epsilon(double t) const;
  bool is_off() const { return kind == Kind::off; }
};

/// Diffusion amplitude family. The operator is diagonal,
///   sigma(t, x) = s(t) * [(1 - theta) + theta * phi(x)] * I,
/// with s(t) = sigma_inf(t)/sqrt(d) and phi(x) = 1/(1 + |x|^2), so the
/// Hilbert-Schmidt norm is bounded by sigma_inf(t) uniformly in x and the
/// map is Lipschitz in x with an explicit constant.
struct NoiseSchedule {
  enum class Kind { constant, power };
  Kind kind = Kind::constant;
  double sigma_star = 0.0;      // uniform HS bound
  double alpha = 0.0;           // sigma_inf^2(t) = sigma_star^2 (t/t0)^(-alpha)
  double t0 = 1.0;
  double state_coupling = 0.0;  // theta in [0, 1]; 0 = additive noise

  static NoiseSchedule make_constant(double sigma_star, double t0 = 1.0,
                                     double state_coupling = 0.0);
  static NoiseSchedule make_power(double sigma_star, double alpha, double t0 = 1.0,
                                  double state_coupling = 0.0);
  static NoiseSchedule make_zero(double t0 = 1.0);

  double sigma_inf(double t) const;
  /// Lipschitz constant of x -> sigma(t,x) in HS norm, uniform over t >= t0:
  /// theta * sigma_star * 3*sqrt(3)/8.
  double lipschitz_bound() const;
  bool is_zero() const { return sigma_star == 0.0; }
  /// sigma_inf in L^2([t0, inf)): power decay with alpha > 1, or no noise at all.
  bool square_integrable() const;

  /// out = sigma(t, x) * dW.
  void apply_into(double t, const Vec& x, const Vec& dW, Vec& out) const;
  Vec apply(double t, const Vec& x, const Vec& dW) const;
};

/// Advisory feasibility flags for the hierarchical-selection tuning.
struct AdmissibilityReport {
  bool t1 = false;                      // eps(t) -> 0
  bool t2 = false;                      // integral of eps diverges
  bool t3 = false;                      // via the sufficient condition r + r/(2p) > 1
  bool noise_square_integrable = false;
  bool strict_tuning = false;           // r > 2p/(2p+1)
  double r = 0.0;
  double p = 0.0;
  double strict_threshold = 0.0;        // 2p/(2p+1)
};

AdmissibilityReport check_admissibility(const TikhonovSchedule& tik, const NoiseSchedule& noise,
                                        const ProblemSpec& problem);

/// Diagnostic partial integral of eps(t) (|x*|^2 - |x_eps(t)|^2) on a log grid,
/// for problems with a cheap viscosity map. Purely informational.
double t3_integral_diagnostic(const TikhonovSchedule& tik, const ProblemSpec& problem,
                              double t_max, int n_grid = 200);

}  // namespace sdiflow
