#include "sdiflow/problems.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace sdiflow {

namespace {

NonsmoothPart zero_nonsmooth() {
  NonsmoothPart g;
  g.zero = true;
  g.value = [](const Vec&) { return 0.0; };
  g.prox = [](const Vec& x, double, Vec& out) { out = x; };
  g.min_norm_subgrad = [](const Vec& x, Vec& out) { out = Vec::Zero(x.size()); };
  return g;
}

double soft(double v, double thr) {
  if (v > thr) return v - thr;
  if (v < -thr) return v + thr;
  return 0.0;
}

// Root of a strictly increasing function on [lo, hi] by bisection.
double bisect_increasing(const std::function<double(double)>& fn, double lo, double hi) {
  double flo = fn(lo);
  if (flo >= 0.0) return lo;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (fn(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double eval_f(const ProblemSpec& problem, const Vec& x) {
  require_dim(x, problem.dim, "eval_f");
  return problem.smooth.value ? problem.smooth.value(x) : 0.0;
}

double eval_g(const ProblemSpec& problem, const Vec& x) {
  require_dim(x, problem.dim, "eval_g");
  return problem.nonsmooth.zero ? 0.0 : problem.nonsmooth.value(x);
}

double eval_F(const ProblemSpec& problem, const Vec& x) {
  require_dim(x, problem.dim, "eval_F");
  require(x.allFinite(), "eval_F: x must be finite");
  return eval_f(problem, x) + eval_g(problem, x);
}

Vec grad_f(const ProblemSpec& problem, const Vec& x) {
  require_dim(x, problem.dim, "grad_f");
  require(x.allFinite(), "grad_f: x must be finite");
  Vec out(problem.dim);
  if (problem.smooth.gradient)
    problem.smooth.gradient(x, out);
  else
    out.setZero();
  return out;
}

Vec prox_g(const ProblemSpec& problem, const Vec& x, double step) {
  require_dim(x, problem.dim, "prox_g");
  require(step > 0.0, "prox_g: step must be > 0");
  Vec out(problem.dim);
  problem.nonsmooth.prox(x, step, out);
  return out;
}

Vec moreau_grad_g(const ProblemSpec& problem, const Vec& x, double lambda) {
  require(lambda > 0.0, "moreau_grad_g: lambda must be > 0");
  Vec p = prox_g(problem, x, lambda);
  return (x - p) / lambda;
}

Vec min_norm_solution(const ProblemSpec& problem) {
  require(problem.solution.min_norm_point.size() == problem.dim,
          "min_norm_solution: problem has no solution data");
  return problem.solution.min_norm_point;
}

Vec solve_tikhonov_prox_gradient(const ProblemSpec& problem, double epsilon, const Vec& x0,
                                 double tol, long max_iters) {
  require(epsilon > 0.0, "solve_tikhonov_prox_gradient: epsilon must be > 0");
  require_dim(x0, problem.dim, "solve_tikhonov_prox_gradient");
  const double step = 1.0 / (problem.smooth.lipschitz_grad + epsilon);
  Vec x = x0, grad(problem.dim), next(problem.dim);
  double residual = kInf;
  for (long it = 0; it < max_iters; ++it) {
    if (problem.smooth.gradient)
      problem.smooth.gradient(x, grad);
    else
      grad.setZero();
    grad += epsilon * x;
    next = x - step * grad;
    problem.nonsmooth.prox(next, step, next);
    residual = (x - next).norm();
    x.swap(next);
    if (residual <= tol) return x;
  }
  throw SolverFailure("tikhonov solve did not converge for eps=" + std::to_string(epsilon),
                      residual);
}

TikhonovPoint tikhonov_point(const ProblemSpec& problem, double epsilon) {
  return tikhonov_point(problem, epsilon, problem.solution.min_norm_point);
}

TikhonovPoint tikhonov_point(const ProblemSpec& problem, double epsilon, const Vec& warm_start) {
  require(epsilon > 0.0, "tikhonov_point: epsilon must be > 0");
  TikhonovPoint tp;
  tp.epsilon = epsilon;
  if (problem.solution.tikhonov_map) {
    tp.point = problem.solution.tikhonov_map(epsilon);
  } else {
    Vec x0 = warm_start.size() == problem.dim ? warm_start : Vec::Zero(problem.dim);
    tp.point = solve_tikhonov_prox_gradient(problem, epsilon, x0);
  }
  tp.objective_value = eval_F(problem, tp.point) + 0.5 * epsilon * tp.point.squaredNorm();
  return tp;
}

// ---- rank-deficient least squares -----------------------------------------

ProblemSpec make_rank_deficient_ls(int dim) {
  require(dim >= 1, "rank_deficient_ls: dim must be >= 1");
  const int rank = (dim + 1) / 2;
  Mat A = Mat::Zero(dim, dim);
  for (int i = 0; i < rank; ++i) A(i, i) = 1.0;
  Vec b = Vec::Zero(dim);
  b[0] = 2.0;
  return make_rank_deficient_ls(A, b);
}

ProblemSpec make_rank_deficient_ls(const Mat& A, const Vec& b) {
  require(A.rows() == b.size(), "rank_deficient_ls: A rows must match b");
  const int dim = static_cast<int>(A.cols());

  ProblemSpec p;
  p.name = "rank_deficient_ls";
  p.dim = dim;

  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  const double cutoff = smax * 1e-12;
  double smin_pos = 0.0;  // smallest nonzero singular value
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) smin_pos = sv[i];
  // Smallest eigenvalue of A^T A (0 when A is rank-deficient or wide).
  double smin_all = 0.0;
  if (A.rows() >= A.cols() && sv.size() == A.cols()) {
    const double s = sv[sv.size() - 1];
    smin_all = s > cutoff ? s : 0.0;
  }

  Mat AtA = A.transpose() * A;
  Vec Atb = A.transpose() * b;
  p.smooth.value = [A, b](const Vec& x) { return 0.5 * (A * x - b).squaredNorm(); };
  p.smooth.gradient = [AtA, Atb](const Vec& x, Vec& out) { out.noalias() = AtA * x - Atb; };
  p.smooth.lipschitz_grad = smax * smax;
  p.smooth.strong_convexity = smin_all * smin_all;
  p.nonsmooth = zero_nonsmooth();

  // Minimum-norm solution is the pseudoinverse solution.
  Vec xstar = svd.solve(b);
  p.solution.min_norm_point = xstar;
  p.solution.min_value = 0.5 * (A * xstar - b).squaredNorm();
  p.solution.tikhonov_map = [AtA, Atb, dim](double eps) -> Vec {
    Mat M = AtA;
    for (int i = 0; i < dim; ++i) M(i, i) += eps;
    return M.ldlt().solve(Atb);
  };

  p.regularity.eb_exponent = 2.0;
  p.regularity.eb_constant = 0.5 * smin_pos * smin_pos;
  p.regularity.eb_radius = kInf;
  return p;
}

// ---- strongly convex quadratic ---------------------------------------------

ProblemSpec make_strongly_convex_quadratic(int dim, double mu) {
  return make_strongly_convex_quadratic(mu, Vec::Zero(dim));
}

ProblemSpec make_strongly_convex_quadratic(double mu, const Vec& center) {
  require(mu > 0.0, "strongly_convex_quadratic: mu must be > 0");
  ProblemSpec p;
  p.name = "strongly_convex_quadratic";
  p.dim = static_cast<int>(center.size());
  Vec c = center;
  p.smooth.value = [mu, c](const Vec& x) { return 0.5 * mu * (x - c).squaredNorm(); };
  p.smooth.gradient = [mu, c](const Vec& x, Vec& out) { out = mu * (x - c); };
  p.smooth.lipschitz_grad = mu;
  p.smooth.strong_convexity = mu;
  p.nonsmooth = zero_nonsmooth();
  p.solution.min_norm_point = c;
  p.solution.min_value = 0.0;
  p.solution.tikhonov_map = [mu, c](double eps) -> Vec { return (mu / (mu + eps)) * c; };
  p.regularity.eb_exponent = 2.0;
  p.regularity.eb_constant = 0.5 * mu;
  p.regularity.eb_radius = kInf;
  return p;
}

// ---- l1-regularized quadratic ----------------------------------------------

ProblemSpec make_l1_quadratic(int dim, double lambda) {
  Vec c(dim);
  for (int i = 0; i < dim; ++i) c[i] = (i % 2 == 0) ? 3.0 : 0.5;
  return make_l1_quadratic(lambda, c);
}

ProblemSpec make_l1_quadratic(double lambda, const Vec& center) {
  require(lambda > 0.0, "l1_quadratic: lambda must be > 0");
  ProblemSpec p;
  p.name = "l1_quadratic";
  p.dim = static_cast<int>(center.size());
  Vec c = center;
  p.smooth.value = [c](const Vec& x) { return 0.5 * (x - c).squaredNorm(); };
  p.smooth.gradient = [c](const Vec& x, Vec& out) { out = x - c; };
  p.smooth.lipschitz_grad = 1.0;
  p.smooth.strong_convexity = 1.0;

  p.nonsmooth.zero = false;
  p.nonsmooth.value = [lambda](const Vec& x) { return lambda * x.lpNorm<1>(); };
  p.nonsmooth.prox = [lambda](const Vec& x, double step, Vec& out) {
    const double thr = step * lambda;
    out.resize(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = soft(x[i], thr);
  };
  p.nonsmooth.min_norm_subgrad = [lambda](const Vec& x, Vec& out) {
    out.resize(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
      out[i] = x[i] > 0.0 ? lambda : (x[i] < 0.0 ? -lambda : 0.0);
  };

  Vec xstar(p.dim);
  for (int i = 0; i < p.dim; ++i) xstar[i] = soft(c[i], lambda);
  p.solution.min_norm_point = xstar;
  p.solution.min_value =
      0.5 * (xstar - c).squaredNorm() + lambda * xstar.lpNorm<1>();
  p.solution.tikhonov_map = [xstar](double eps) -> Vec { return xstar / (1.0 + eps); };

  p.regularity.eb_exponent = 2.0;
  p.regularity.eb_constant = 0.5;
  p.regularity.eb_radius = kInf;
  return p;
}

// ---- dist(., S)^p ----------------------------------------------------------

namespace {

struct Interval {
  double lo, hi;
  double clamp1(double v) const { return std::min(std::max(v, lo), hi); }
};

// proj onto S = [lo,hi] x {0}^(d-1); returns squared distance.
double project_dist_sq(const Interval& s, const Vec& x, Vec& proj) {
  proj.setZero();
  proj[0] = s.clamp1(x[0]);
  double d2 = (x[0] - proj[0]) * (x[0] - proj[0]);
  for (Eigen::Index i = 1; i < x.size(); ++i) d2 += x[i] * x[i];
  return d2;
}

}  // namespace

ProblemSpec make_dist_power(int dim, double p_exp, double lo, double hi) {
  require(dim >= 1, "dist_power: dim must be >= 1");
  require(lo < hi, "dist_power: need lo < hi");
  require(lo > 0.0, "dist_power: interval must be offset from the origin (lo > 0)");
  require(p_exp == 1.0 || p_exp >= 2.0,
          "dist_power: p must be 1 or >= 2 (gradient is not Lipschitz for p in (1,2))");

  ProblemSpec p;
  p.name = "dist_power";
  p.dim = dim;
  const Interval s{lo, hi};

  if (p_exp == 1.0) {
    // Nonsmooth: f = 0, g = dist(., S) with exact prox.
    p.smooth.value = [](const Vec&) { return 0.0; };
    p.smooth.gradient = [](const Vec&, Vec& out) { out.setZero(); };
    p.smooth.lipschitz_grad = 0.0;

    p.nonsmooth.zero = false;
    p.nonsmooth.value = [s](const Vec& x) {
      Vec proj(x.size());
      return std::sqrt(project_dist_sq(s, x, proj));
    };
    p.nonsmooth.prox = [s](const Vec& x, double step, Vec& out) {
      out.resize(x.size());
      Vec proj(x.size());
      const double d = std::sqrt(project_dist_sq(s, x, proj));
      if (d <= step) {
        out = proj;
      } else {
        out = x + (step / d) * (proj - x);
      }
    };
    p.nonsmooth.min_norm_subgrad = [s](const Vec& x, Vec& out) {
      out.resize(x.size());
      Vec proj(x.size());
      const double d = std::sqrt(project_dist_sq(s, x, proj));
      if (d <= 0.0) {
        out.setZero();
      } else {
        out = (x - proj) / d;
      }
    };
    // x_eps stays pinned at the left endpoint while eps * lo <= 1 (sharp growth).
    p.solution.tikhonov_map = [s, dim](double eps) -> Vec {
      Vec out = Vec::Zero(dim);
      out[0] = std::min(s.lo, 1.0 / eps);
      return out;
    };
  } else {
    p.smooth.value = [s, p_exp](const Vec& x) {
      Vec proj(x.size());
      const double d2 = project_dist_sq(s, x, proj);
      return std::pow(d2, 0.5 * p_exp);
    };
    p.smooth.gradient = [s, p_exp](const Vec& x, Vec& out) {
      Vec proj(x.size());
      const double d2 = project_dist_sq(s, x, proj);
      if (d2 == 0.0) {
        out.setZero();
        return;
      }
      const double scale = p_exp * std::pow(d2, 0.5 * p_exp - 1.0);
      out = scale * (x - proj);
    };
    // Region-valid Lipschitz constant: |x| <= 10 around the interval.
    const double dist_bound = 10.0 + std::max(std::abs(lo), std::abs(hi));
    p.smooth.lipschitz_grad =
        p_exp == 2.0 ? 2.0 : p_exp * (p_exp - 1.0) * std::pow(dist_bound, p_exp - 2.0);
    p.nonsmooth = zero_nonsmooth();
    // Stationarity in the first coordinate: p (lo - u)^(p-1) = eps u on (0, lo).
    p.solution.tikhonov_map = [s, p_exp, dim](double eps) -> Vec {
      Vec out = Vec::Zero(dim);
      const double u = bisect_increasing(
          [&](double v) { return eps * v - p_exp * std::pow(s.lo - v, p_exp - 1.0); }, 0.0, s.lo);
      out[0] = u;
      return out;
    };
  }

  Vec xstar = Vec::Zero(dim);
  xstar[0] = lo;
  p.solution.min_norm_point = xstar;
  p.solution.min_value = 0.0;

  p.regularity.eb_exponent = p_exp;
  p.regularity.eb_constant = 1.0;
  p.regularity.eb_radius = kInf;
  return p;
}

// ---- quartic valley ----------------------------------------------------------

ProblemSpec make_quartic_valley(int dim, double b) {
  Vec a = Vec::Zero(dim);
  a[0] = 1.0;
  return make_quartic_valley(a, b);
}

ProblemSpec make_quartic_valley(const Vec& a, double b) {
  require(a.norm() > 0.0, "quartic_valley: a must be nonzero");
  ProblemSpec p;
  p.name = "quartic_valley";
  p.dim = static_cast<int>(a.size());
  Vec av = a;
  const double a2 = av.squaredNorm();

  p.smooth.value = [av, b](const Vec& x) {
    const double u = av.dot(x) - b;
    return 0.25 * u * u * u * u;
  };
  p.smooth.gradient = [av, b](const Vec& x, Vec& out) {
    const double u = av.dot(x) - b;
    out = (u * u * u) * av;
  };
  // Region-valid constant: |a.x - b| <= |a| * 10 + |b|.
  const double u_bound = std::sqrt(a2) * 10.0 + std::abs(b);
  p.smooth.lipschitz_grad = 3.0 * u_bound * u_bound * a2;
  p.nonsmooth = zero_nonsmooth();

  p.solution.min_norm_point = (b / a2) * av;
  p.solution.min_value = 0.0;
  // x_eps = -(u^3/eps) a where u solves u + u^3 |a|^2/eps + b = 0.
  p.solution.tikhonov_map = [av, b, a2](double eps) -> Vec {
    const double lim = std::abs(b) + 1.0;
    double lo = -lim, hi = lim;
    auto psi = [&](double u) { return u + u * u * u * a2 / eps + b; };
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (psi(mid) < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    const double u = 0.5 * (lo + hi);
    return -(u * u * u / eps) * av;
  };

  p.regularity.eb_exponent = 4.0;
  p.regularity.eb_constant = 0.25 * a2 * a2;
  p.regularity.eb_radius = kInf;
  return p;
}

std::vector<ProblemSpec> builtin_problems() {
  std::vector<ProblemSpec> zoo;
  zoo.push_back(make_rank_deficient_ls(2));
  zoo.push_back(make_strongly_convex_quadratic(10, 1.0));
  zoo.push_back(make_l1_quadratic(10, 1.0));
  zoo.push_back(make_dist_power(1, 2.0, 1.0, 2.0));
  zoo.push_back(make_quartic_valley(2, 1.0));
  return zoo;
}

}  // namespace sdiflow
