#include <doctest.h>

#include <cmath>

#include "sdiflow/analysis.hpp"
#include "sdiflow/quadrature.hpp"
#include "test_util.hpp"

using namespace sdiflow;
using namespace sdiflow::testing;

namespace {

std::vector<double> geomspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
  return out;
}

}  // namespace

TEST_CASE("fit_rate recovers exact power laws") {
  const std::vector<double> t = geomspace(1.0, 1e4, 40);
  std::vector<double> v(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) v[i] = 3.7 / t[i];
  const RateFit fit = fit_rate(t, v, 1.0, 1e4, -1.0, 0.15);
  CHECK(std::abs(fit.fitted - (-1.0)) <= 1e-10);
  CHECK(fit.pass);
  CHECK(fit.stderr_ <= 1e-10);

  std::vector<double> flat(t.size(), 2.5);
  CHECK(std::abs(fit_rate(t, flat, 1.0, 1e4).fitted) <= 1e-12);

  std::vector<double> with_zero = v;
  with_zero[20] = 0.0;
  CHECK_THROWS_AS(fit_rate(t, with_zero, 1.0, 1e4), FitError);
  CHECK_THROWS_AS(fit_rate(t, v, 9e3, 1e4), FitError);  // < 8 points
}

TEST_CASE("fit_exponential_rate recovers exact exponential decay") {
  std::vector<double> t(32), v(32);
  for (int i = 0; i < 32; ++i) {
    t[i] = 1.0 + 0.25 * i;
    v[i] = 5.0 * std::exp(-2.0 * t[i]);
  }
  const RateFit fit = fit_exponential_rate(t, v, 1.0, 10.0, -2.0, 0.1);
  CHECK(std::abs(fit.fitted - (-2.0)) <= 1e-12);
  CHECK(fit.pass);
}

TEST_CASE("theoretical_rate case analysis") {
  const ProblemSpec ls = make_rank_deficient_ls(2);         // convex, p = 2, g = 0
  const ProblemSpec sc = make_strongly_convex_quadratic(2); // mu = 1
  const TikhonovSchedule off = TikhonovSchedule::make_off();

  // Convex ergodic rate with square-integrable noise.
  const RatePrediction erg =
      theoretical_rate(ls, off, NoiseSchedule::make_power(0.5, 2.0), Observable::ergodic_gap);
  CHECK(erg.has_exponent);
  CHECK(erg.exponent == doctest::Approx(-1.0));

  // Bounded noise: floor, no exponent.
  CHECK_FALSE(theoretical_rate(ls, off, NoiseSchedule::make_constant(0.3), Observable::ergodic_gap)
                  .has_exponent);

  // Strongly convex with decaying noise: power tail of max{e^{-mu t}, sigma^2}.
  const RatePrediction scr =
      theoretical_rate(sc, off, NoiseSchedule::make_power(0.5, 2.0), Observable::dist_sq);
  CHECK(scr.has_exponent);
  CHECK(scr.exponent == doctest::Approx(-2.0));

  // Tikhonov smooth case, r = 0.9.
  const TikhonovSchedule tik = TikhonovSchedule::make_power(1.0, 0.9);
  const RatePrediction g1 =
      theoretical_rate(ls, tik, NoiseSchedule::make_power(0.5, 2.0), Observable::gap);
  CHECK(g1.exponent == doctest::Approx(-0.9));  // alpha = 2 >= 2r
  const RatePrediction g2 =
      theoretical_rate(ls, tik, NoiseSchedule::make_power(0.5, 1.5), Observable::gap);
  CHECK(g2.exponent == doctest::Approx(-0.6));  // alpha in (1, 2r): -(alpha - r)

  // Distance cases, alpha > max(2r, 1).
  const RatePrediction d1 =
      theoretical_rate(ls, tik, NoiseSchedule::make_power(0.5, 2.5), Observable::dist_sq);
  CHECK(d1.exponent == doctest::Approx(-std::min({1.0 - 0.9, 0.9 / 2.0, 2.5 - 1.8})));
  const RatePrediction v1 = theoretical_rate(ls, tik, NoiseSchedule::make_power(0.5, 2.5),
                                             Observable::dist_to_viscosity_sq);
  CHECK(v1.exponent == doctest::Approx(-0.1));

  // r > 1/2 with alpha <= 2r: the rate oracle declines to guess.
  const RatePrediction nop = theoretical_rate(ls, tik, NoiseSchedule::make_power(0.5, 1.2),
                                              Observable::dist_to_viscosity_sq);
  CHECK_FALSE(nop.has_exponent);
  CHECK_FALSE(nop.note.empty());

  // Deterministic Tikhonov (thm rates): gap -r, viscosity distance -(1-r).
  const RatePrediction det_gap =
      theoretical_rate(ls, tik, NoiseSchedule::make_zero(), Observable::gap);
  CHECK(det_gap.exponent == doctest::Approx(-0.9));
  const RatePrediction det_visc =
      theoretical_rate(ls, tik, NoiseSchedule::make_zero(), Observable::dist_to_viscosity_sq);
  CHECK(det_visc.exponent == doctest::Approx(-0.1));
  // dist to x*: r >= p/(p+1) = 2/3 -> 1-r branch.
  const RatePrediction det_dist =
      theoretical_rate(ls, tik, NoiseSchedule::make_zero(), Observable::dist_sq);
  CHECK(det_dist.exponent == doctest::Approx(-0.1));
}

TEST_CASE("theoretical_rate is total over the zoo x schedule grid") {
  const std::vector<TikhonovSchedule> tiks = {
      TikhonovSchedule::make_off(), TikhonovSchedule::make_power(1.0, 0.6),
      TikhonovSchedule::make_power(1.0, 0.75), TikhonovSchedule::make_power(1.0, 0.9)};
  const std::vector<NoiseSchedule> noises = {
      NoiseSchedule::make_zero(), NoiseSchedule::make_constant(0.3),
      NoiseSchedule::make_power(0.5, 1.5), NoiseSchedule::make_power(0.5, 2.0),
      NoiseSchedule::make_power(0.5, 2.5)};
  for (const ProblemSpec& p : builtin_problems()) {
    for (const auto& tik : tiks) {
      for (const auto& noise : noises) {
        for (Observable obs : {Observable::gap, Observable::ergodic_gap, Observable::dist_sq,
                               Observable::dist_to_viscosity_sq, Observable::lyapunov}) {
          const RatePrediction pred = theoretical_rate(p, tik, noise, obs);
          CHECK((pred.has_exponent || !pred.note.empty()));
        }
      }
    }
  }
}

TEST_CASE("compute_R: zero noise, decay rate, and stability") {
  CHECK(compute_R(10.0, 0.5, 1.0, NoiseSchedule::make_zero()) == doctest::Approx(0.0));

  // sigma_inf^2(s) = s^-2: R decays like t^(r - alpha) = t^-1.5 once the
  // Laplace regime sets in (t >= 1e2; the 10 -> 100 stretch is still
  // transient-dominated at slope -1.75).
  const NoiseSchedule n = NoiseSchedule::make_power(1.0, 2.0, 1.0);
  std::vector<double> ts = {100.0, 1000.0, 10000.0}, rs;
  for (double t : ts) rs.push_back(compute_R(t, 0.5, 1.0, n));
  const double s01 = std::log(rs[1] / rs[0]) / std::log(ts[1] / ts[0]);
  const double s12 = std::log(rs[2] / rs[1]) / std::log(ts[2] / ts[1]);
  CHECK(std::abs(s01 - (-1.5)) <= 0.1);
  CHECK(std::abs(s12 - (-1.5)) <= 0.1);

  // R(t) -> 0 for every square-integrable noise in the grid.
  for (double alpha : {1.5, 2.0, 3.0}) {
    const NoiseSchedule nn = NoiseSchedule::make_power(0.7, alpha, 1.0);
    const double r_small = compute_R(1e3, 0.7, 1.0, nn);
    const double r_large = compute_R(1e5, 0.7, 1.0, nn);
    CHECK(r_large < r_small);
  }

  // No overflow at extreme horizons with r close to 1.
  const double far = compute_R(1e6, 0.9, 1.0, n);
  CHECK(std::isfinite(far));
  CHECK(far > 0.0);

  CHECK_THROWS_AS(compute_R(0.5, 0.5, 1.0, n), ContractViolation);
}

TEST_CASE("fit_rate needs at least 8 points") {
  // compute_R acceptance fits use a dense grid; keep the contract pinned here.
  std::vector<double> t = geomspace(1.0, 10.0, 7), v = t;
  CHECK_THROWS_AS(fit_rate(t, v, 1.0, 10.0), FitError);
}

TEST_CASE("dawson_bound_check") {
  // b = 1 closed form: D = 1 - exp(-a t).
  const DawsonCheck d = dawson_bound_check(1.0, 1.0, 5.0);
  CHECK(d.value == doctest::Approx(1.0 - std::exp(-5.0)).epsilon(1e-8));
  CHECK(d.bound == doctest::Approx(2.0));

  // t -> 0+: empty integral.
  CHECK(dawson_bound_check(1.0, 1.0, 1e-12).value <= 1e-11);

  // 100-point grid: the bound always holds.
  int violations = 0, count = 0;
  for (double a : {0.3, 1.0, 2.0, 5.0}) {
    for (double b : {0.25, 0.5, 1.0, 1.5, 2.0}) {
      for (double t : {0.1, 1.0, 3.0, 10.0, 100.0}) {
        const DawsonCheck c = dawson_bound_check(a, b, t);
        ++count;
        if (c.value > c.bound * (1.0 + 1e-9)) ++violations;
      }
    }
  }
  CHECK(count == 100);
  CHECK(violations == 0);
}

TEST_CASE("tikhonov_curve_study") {
  const std::vector<double> grid = geomspace(1e-6, 1e-1, 26);
  std::vector<double> decreasing(grid.rbegin(), grid.rend());

  SUBCASE("rank-deficient LS: |x_eps - x*| = 2 eps/(1+eps), slope 1") {
    const TikhonovCurveStudy study =
        tikhonov_curve_study(make_rank_deficient_ls(2), decreasing);
    CHECK_FALSE(study.degenerate);
    CHECK(study.browder_ok);
    CHECK(study.fitted_slope == doctest::Approx(1.0).epsilon(0.02));
    CHECK(study.pass);  // 1 >= 1/(2p) - 0.05 = 0.2
    for (const auto& pt : study.points) {
      const double expected = 2.0 * pt.epsilon / (1.0 + pt.epsilon);
      CHECK(pt.dist_to_xstar == doctest::Approx(expected).epsilon(1e-8));
    }
  }

  SUBCASE("strongly convex quadratic centered at the origin is degenerate") {
    const TikhonovCurveStudy study =
        tikhonov_curve_study(make_strongly_convex_quadratic(3, 1.0), decreasing);
    CHECK(study.degenerate);
    CHECK(study.browder_ok);
    CHECK(study.pass);
  }

  SUBCASE("dist^2 slope from the bisection-backed curve is at least 1/(2p)") {
    const TikhonovCurveStudy study =
        tikhonov_curve_study(make_dist_power(1, 2.0, 1.0, 2.0), decreasing);
    CHECK(study.fitted_slope >= 0.25 - 0.05);
    CHECK(study.pass);
  }

  SUBCASE("grid validation") {
    CHECK_THROWS_AS(tikhonov_curve_study(make_rank_deficient_ls(2), {0.1, 0.2}),
                    ContractViolation);
    CHECK_THROWS_AS(tikhonov_curve_study(make_rank_deficient_ls(2), {0.1, 0.0}),
                    ContractViolation);
  }
}
