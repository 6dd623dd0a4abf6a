#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sdiflow/analysis.hpp"
#include "sdiflow/config.hpp"
#include "sdiflow/experiment.hpp"
#include "sdiflow/montecarlo.hpp"

namespace py = pybind11;
using namespace sdiflow;

namespace {

ProblemSpec problem_from_json_str(const std::string& name, const std::string& params_json) {
  const json params = params_json.empty() ? json::object() : json::parse(params_json);
  return make_problem(name, params);
}

py::dict record_to_dict(const TrajectoryRecord& rec) {
  py::dict d;
  d["times"] = rec.times;
  py::list states;
  for (const Vec& s : rec.states) states.append(s);
  d["states"] = states;
  d["gap"] = rec.gap;
  d["gap_integrals"] = rec.gap_integrals;
  d["dist_to_min_norm_sq"] = rec.dist_to_min_norm_sq;
  if (!rec.lyapunov.empty()) d["lyapunov"] = rec.lyapunov;
  if (!rec.dist_to_viscosity_sq.empty()) d["dist_to_viscosity_sq"] = rec.dist_to_viscosity_sq;
  d["seed"] = rec.seed;
  return d;
}

py::dict stats_to_dict(const EnsembleStats& s) {
  py::dict d;
  d["times"] = s.times;
  d["mean_gap"] = s.mean_gap;
  d["se_gap"] = s.se_gap;
  d["mean_dist_sq"] = s.mean_dist_sq;
  d["se_dist_sq"] = s.se_dist_sq;
  d["ergodic_gap"] = s.ergodic_gap;
  d["se_ergodic_gap"] = s.se_ergodic_gap;
  d["jensen_gap"] = s.jensen_gap;
  d["se_jensen_gap"] = s.se_jensen_gap;
  if (!s.mean_lyapunov.empty()) d["mean_lyapunov"] = s.mean_lyapunov;
  if (!s.mean_dist_to_viscosity_sq.empty())
    d["mean_dist_to_viscosity_sq"] = s.mean_dist_to_viscosity_sq;
  d["n_paths"] = s.n_paths;
  d["n_diverged"] = s.n_diverged;
  return d;
}

IntegratorConfig integrator_config(const std::string& scheme, double h, double t0, double T,
                                   double lambda, int n_record, bool record_viscosity) {
  IntegratorConfig cfg;
  if (scheme == "prox_em")
    cfg.scheme = Scheme::prox_em;
  else if (scheme == "yosida_em")
    cfg.scheme = Scheme::yosida_em;
  else
    throw ContractViolation("scheme must be 'prox_em' or 'yosida_em'");
  cfg.h = h;
  cfg.t0 = t0;
  cfg.horizon_T = T;
  cfg.lambda = lambda;
  cfg.record_times = log_spaced_times(t0, T, n_record);
  cfg.record_viscosity = record_viscosity;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Stochastic subgradient flows with Tikhonov regularization";

  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);
  py::register_exception<SolverFailure>(m, "SolverFailure", PyExc_RuntimeError);
  py::register_exception<FitError>(m, "FitError", PyExc_RuntimeError);

  py::class_<ProblemSpec>(m, "Problem")
      .def_property_readonly("name", [](const ProblemSpec& p) { return p.name; })
      .def_property_readonly("dim", [](const ProblemSpec& p) { return p.dim; })
      .def_property_readonly("lipschitz_grad",
                             [](const ProblemSpec& p) { return p.smooth.lipschitz_grad; })
      .def_property_readonly("strong_convexity",
                             [](const ProblemSpec& p) { return p.smooth.strong_convexity; })
      .def_property_readonly("eb_exponent",
                             [](const ProblemSpec& p) { return p.regularity.eb_exponent; })
      .def_property_readonly("min_value",
                             [](const ProblemSpec& p) { return p.solution.min_value; })
      .def("eval_F", [](const ProblemSpec& p, const Vec& x) { return eval_F(p, x); })
      .def("grad_f", [](const ProblemSpec& p, const Vec& x) { return grad_f(p, x); })
      .def("prox_g",
           [](const ProblemSpec& p, const Vec& x, double step) { return prox_g(p, x, step); })
      .def("moreau_grad_g", [](const ProblemSpec& p, const Vec& x, double lam) {
        return moreau_grad_g(p, x, lam);
      })
      .def("min_norm_solution", [](const ProblemSpec& p) { return min_norm_solution(p); })
      .def("tikhonov_point",
           [](const ProblemSpec& p, double eps) {
             const TikhonovPoint tp = tikhonov_point(p, eps);
             return py::make_tuple(tp.point, tp.objective_value);
           })
      .def("__repr__", [](const ProblemSpec& p) {
        return "<Problem " + p.name + " dim=" + std::to_string(p.dim) + ">";
      });

  m.def("make_problem", &problem_from_json_str, py::arg("name"), py::arg("params_json") = "",
        "Build a test problem by name with a JSON parameter table");
  m.def("builtin_problems", &builtin_problems);

  py::class_<TikhonovSchedule>(m, "TikhonovSchedule")
      .def_static("off", &TikhonovSchedule::make_off, py::arg("t0") = 1.0)
      .def_static("power", &TikhonovSchedule::make_power, py::arg("c"), py::arg("r"),
                  py::arg("t0") = 1.0)
      .def("epsilon", &TikhonovSchedule::epsilon)
      .def_property_readonly("r", [](const TikhonovSchedule& s) { return s.r; });

  py::class_<NoiseSchedule>(m, "NoiseSchedule")
      .def_static("zero", &NoiseSchedule::make_zero, py::arg("t0") = 1.0)
      .def_static("constant", &NoiseSchedule::make_constant, py::arg("sigma_star"),
                  py::arg("t0") = 1.0, py::arg("state_coupling") = 0.0)
      .def_static("power", &NoiseSchedule::make_power, py::arg("sigma_star"), py::arg("alpha"),
                  py::arg("t0") = 1.0, py::arg("state_coupling") = 0.0)
      .def("sigma_inf", &NoiseSchedule::sigma_inf)
      .def("lipschitz_bound", &NoiseSchedule::lipschitz_bound)
      .def("square_integrable", &NoiseSchedule::square_integrable)
      .def("apply", &NoiseSchedule::apply);

  m.def(
      "check_admissibility",
      [](const TikhonovSchedule& tik, const NoiseSchedule& noise, const ProblemSpec& p) {
        const AdmissibilityReport rep = check_admissibility(tik, noise, p);
        py::dict d;
        d["T1"] = rep.t1;
        d["T2"] = rep.t2;
        d["T3"] = rep.t3;
        d["noise_square_integrable"] = rep.noise_square_integrable;
        d["strict_tuning"] = rep.strict_tuning;
        d["strict_threshold"] = rep.strict_threshold;
        return d;
      },
      py::arg("tikhonov"), py::arg("noise"), py::arg("problem"));

  m.def(
      "simulate_path",
      [](const ProblemSpec& p, const TikhonovSchedule& tik, const NoiseSchedule& noise,
         const std::string& scheme, double h, double t0, double T, double lambda, int n_record,
         bool record_viscosity, const Vec& x0, std::uint64_t seed) {
        const IntegratorConfig cfg =
            integrator_config(scheme, h, t0, T, lambda, n_record, record_viscosity);
        return record_to_dict(
            simulate_path(p, tik, noise, cfg, InitialState::constant(x0), seed));
      },
      py::arg("problem"), py::arg("tikhonov"), py::arg("noise"), py::arg("scheme") = "prox_em",
      py::arg("h") = 1e-3, py::arg("t0") = 1.0, py::arg("T") = 100.0, py::arg("lambda") = 1e-2,
      py::arg("n_record") = 64, py::arg("record_viscosity") = false, py::arg("x0"),
      py::arg("seed") = 0);

  m.def(
      "run_ensemble",
      [](const ProblemSpec& p, const TikhonovSchedule& tik, const NoiseSchedule& noise,
         const std::string& scheme, double h, double t0, double T, double lambda, int n_record,
         bool record_viscosity, const Vec& x0, int n_paths, std::uint64_t base_seed,
         int threads) {
        const IntegratorConfig cfg =
            integrator_config(scheme, h, t0, T, lambda, n_record, record_viscosity);
        EnsembleConfig ens;
        ens.n_paths = n_paths;
        ens.base_seed = base_seed;
        ens.init = InitialState::constant(x0);
        ens.n_threads = threads;
        py::gil_scoped_release release;
        const EnsembleResult res = run_ensemble(p, tik, noise, cfg, ens);
        py::gil_scoped_acquire acquire;
        return stats_to_dict(res.stats);
      },
      py::arg("problem"), py::arg("tikhonov"), py::arg("noise"), py::arg("scheme") = "prox_em",
      py::arg("h") = 1e-3, py::arg("t0") = 1.0, py::arg("T") = 100.0, py::arg("lambda") = 1e-2,
      py::arg("n_record") = 64, py::arg("record_viscosity") = false, py::arg("x0"),
      py::arg("n_paths") = 2, py::arg("base_seed") = 0, py::arg("threads") = 0);

  m.def(
      "fit_rate",
      [](const std::vector<double>& times, const std::vector<double>& values, double lo, double hi,
         double predicted, double tolerance) {
        const RateFit f = fit_rate(times, values, lo, hi, predicted, tolerance);
        py::dict d;
        d["fitted"] = f.fitted;
        d["stderr"] = f.stderr_;
        d["predicted"] = f.predicted;
        d["pass"] = f.pass;
        d["n_points"] = f.n_points;
        return d;
      },
      py::arg("times"), py::arg("values"), py::arg("lo"), py::arg("hi"),
      py::arg("predicted") = kNaN, py::arg("tolerance") = 0.15);

  m.def(
      "theoretical_rate",
      [](const ProblemSpec& p, const TikhonovSchedule& tik, const NoiseSchedule& noise,
         const std::string& observable) -> py::object {
        const RatePrediction pred =
            theoretical_rate(p, tik, noise, observable_from_string(observable));
        if (pred.has_exponent) return py::float_(pred.exponent);
        return py::str(pred.note);
      },
      py::arg("problem"), py::arg("tikhonov"), py::arg("noise"), py::arg("observable"));

  m.def("compute_R", &compute_R, py::arg("t"), py::arg("r"), py::arg("t1"), py::arg("noise"));

  m.def(
      "dawson_bound_check",
      [](double a, double b, double t) {
        const DawsonCheck c = dawson_bound_check(a, b, t);
        return py::make_tuple(c.value, c.bound);
      },
      py::arg("a"), py::arg("b"), py::arg("t"));

  m.def(
      "tikhonov_curve_study",
      [](const ProblemSpec& p, const std::vector<double>& grid) {
        const TikhonovCurveStudy s = tikhonov_curve_study(p, grid);
        py::dict d;
        d["epsilon"] = [&] {
          std::vector<double> v;
          for (const auto& pt : s.points) v.push_back(pt.epsilon);
          return v;
        }();
        d["norm_x_eps"] = [&] {
          std::vector<double> v;
          for (const auto& pt : s.points) v.push_back(pt.norm_x_eps);
          return v;
        }();
        d["dist_to_xstar"] = [&] {
          std::vector<double> v;
          for (const auto& pt : s.points) v.push_back(pt.dist_to_xstar);
          return v;
        }();
        d["degenerate"] = s.degenerate;
        d["browder_ok"] = s.browder_ok;
        d["fitted_slope"] = s.fitted_slope;
        d["pass"] = s.pass;
        return d;
      },
      py::arg("problem"), py::arg("eps_grid"));

  m.def(
      "run_simulate_file",
      [](const std::string& config_path, const std::string& output_dir, int threads) {
        ExperimentConfig cfg = load_config_file(config_path);
        RunOptions opts;
        if (!output_dir.empty()) opts.output_dir = output_dir;
        opts.threads = threads;
        py::gil_scoped_release release;
        std::ostringstream log, err;
        const int code = run_simulate(cfg, opts, log, err);
        py::gil_scoped_acquire acquire;
        return py::make_tuple(code, log.str(), err.str());
      },
      py::arg("config_path"), py::arg("output_dir") = "", py::arg("threads") = 0);
}
