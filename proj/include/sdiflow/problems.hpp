#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sdiflow/common.hpp"

namespace sdiflow {

/// Smooth component f: convex, differentiable, with L-Lipschitz gradient.
/// Gradient writes into a caller-supplied buffer to keep the integrator
/// loop allocation-free.
struct SmoothPart {
  std::function<double(const Vec&)> value;
  std::function<void(const Vec&, Vec&)> gradient;
  double lipschitz_grad = 0.0;   // L; 0 means "no smooth drift"
  double strong_convexity = 0.0; // mu >= 0
};

/// Nonsmooth component g: proper, continuous, convex. May be identically zero.
struct NonsmoothPart {
  bool zero = true;
  std::function<double(const Vec&)> value;
  /// prox(x, step, out): out = argmin_u { g(u) + |u - x|^2 / (2 step) }
  std::function<void(const Vec&, double, Vec&)> prox;
  /// Minimal-norm subgradient selection of g.
  std::function<void(const Vec&, Vec&)> min_norm_subgrad;
};

struct SolutionData {
  double min_value = 0.0;
  Vec min_norm_point;  // x* = proj onto argmin F of the origin
  /// Closed-form (or exact 1-D) viscosity curve eps -> x_eps, when available.
  std::function<Vec(double)> tikhonov_map;
};

/// Holderian error-bound data: F(x) - min F >= eb_constant * dist(x,S)^eb_exponent
/// on the sublevel set [F <= eb_radius].
struct Regularity {
  double eb_exponent = 2.0;  // p >= 1
  double eb_constant = 0.0;  // gamma; 0 = unknown
  double eb_radius = kInf;   // validity threshold, > min F
};

struct ProblemSpec {
  std::string name;
  int dim = 0;
  SmoothPart smooth;
  NonsmoothPart nonsmooth;
  SolutionData solution;
  Regularity regularity;
};

struct TikhonovPoint {
  double epsilon = 0.0;
  Vec point;
  double objective_value = 0.0;  // F_eps(x_eps)
};

// ---- oracles -------------------------------------------------------------

double eval_F(const ProblemSpec& problem, const Vec& x);
double eval_f(const ProblemSpec& problem, const Vec& x);
double eval_g(const ProblemSpec& problem, const Vec& x);
Vec grad_f(const ProblemSpec& problem, const Vec& x);
Vec prox_g(const ProblemSpec& problem, const Vec& x, double step);
/// Yosida approximation of the subdifferential of g: (x - prox_{lambda g}(x)) / lambda.
Vec moreau_grad_g(const ProblemSpec& problem, const Vec& x, double lambda);

/// Unique minimizer of F_eps = F + (eps/2)|.|^2.  Uses the problem's exact map
/// when present, otherwise a proximal-gradient solve (step 1/(L+eps), prox
/// fixed-point residual <= tol, capped iterations).
TikhonovPoint tikhonov_point(const ProblemSpec& problem, double epsilon);
TikhonovPoint tikhonov_point(const ProblemSpec& problem, double epsilon, const Vec& warm_start);

Vec min_norm_solution(const ProblemSpec& problem);

/// Proximal-gradient solve of F_eps from x0. Exposed for reuse and testing.
Vec solve_tikhonov_prox_gradient(const ProblemSpec& problem, double epsilon, const Vec& x0,
                                 double tol = 1e-10, long max_iters = 1000000);

// ---- the zoo -------------------------------------------------------------

/// f = 0.5 |A x - b|^2, g = 0, with A rank-deficient so the solution set is an
/// affine subspace. Default A for dimension d: diag with ceil(d/2) leading ones;
/// b = (2, 0, ..., 0).
ProblemSpec make_rank_deficient_ls(int dim = 2);
ProblemSpec make_rank_deficient_ls(const Mat& A, const Vec& b);

/// f = (mu/2) |x - center|^2, g = 0.
ProblemSpec make_strongly_convex_quadratic(int dim = 10, double mu = 1.0);
ProblemSpec make_strongly_convex_quadratic(double mu, const Vec& center);

/// f = 0.5 |x - center|^2, g = lambda |x|_1. Default center alternates 3, 0.5
/// so the solution has both active and thresholded coordinates.
ProblemSpec make_l1_quadratic(int dim = 10, double lambda = 1.0);
ProblemSpec make_l1_quadratic(double lambda, const Vec& center);

/// dist(x, S)^p where S = [lo, hi] x {0}^(d-1), 0 < lo < hi.
/// p == 1: housed in the g slot with an exact prox (f = 0).
/// p >= 2: smooth, housed in the f slot. Exponents in (1,2) are rejected:
/// the gradient is only Holder there, breaking the Lipschitz standing assumption.
ProblemSpec make_dist_power(int dim = 1, double p = 2.0, double lo = 1.0, double hi = 2.0);

/// f = 0.25 (a.x - b)^4: smooth, convex, non-strongly-convex flat valley with
/// error-bound exponent 4 (Lojasiewicz exponent 3/4).
ProblemSpec make_quartic_valley(int dim = 2, double b = 1.0);
ProblemSpec make_quartic_valley(const Vec& a, double b);

/// The built-in test set: rank-deficient LS, strongly convex quadratic,
/// l1-regularized quadratic, dist^p, quartic valley.
std::vector<ProblemSpec> builtin_problems();

}  // namespace sdiflow
