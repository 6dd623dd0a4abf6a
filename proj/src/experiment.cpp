#include "sdiflow/experiment.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace sdiflow {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

fs::path resolve_output_dir(const ExperimentConfig& cfg, const RunOptions& opts) {
  fs::path dir = opts.output_dir ? *opts.output_dir : cfg.output_dir;
  if (dir.is_relative()) {
    if (const char* root = std::getenv("SDIFLOW_OUTPUT_ROOT")) dir = fs::path(root) / dir;
  }
  fs::create_directories(dir);
  return dir;
}

void write_ensemble_csv(const fs::path& file, const EnsembleStats& s) {
  std::ofstream out(file);
  out << "t,mean_gap,se_gap,mean_dist_sq,se_dist_sq,ergodic_gap,mean_lyapunov,n_paths\n";
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    const double lyap = s.mean_lyapunov.empty() ? kNaN : s.mean_lyapunov[i];
    out << format_double(s.times[i]) << ',' << format_double(s.mean_gap[i]) << ','
        << format_double(s.se_gap[i]) << ',' << format_double(s.mean_dist_sq[i]) << ','
        << format_double(s.se_dist_sq[i]) << ',' << format_double(s.ergodic_gap[i]) << ','
        << format_double(lyap) << ',' << s.n_paths << '\n';
  }
}

struct NamedFit {
  std::string observable;
  RateFit fit;
  std::string verdict;  // pass | fail | no_prediction
};

void write_rates_csv(const fs::path& file, const std::vector<NamedFit>& fits) {
  std::ofstream out(file);
  out << "observable,window_lo,window_hi,fitted,stderr,predicted,verdict\n";
  for (const NamedFit& nf : fits) {
    out << nf.observable << ',' << format_double(nf.fit.window_lo) << ','
        << format_double(nf.fit.window_hi) << ',' << format_double(nf.fit.fitted) << ','
        << format_double(nf.fit.stderr_) << ',' << format_double(nf.fit.predicted) << ','
        << nf.verdict << '\n';
  }
}

json admissibility_json(const AdmissibilityReport& rep) {
  json j;
  j["T1"] = rep.t1;
  j["T2"] = rep.t2;
  j["T3"] = rep.t3;
  j["noise_square_integrable"] = rep.noise_square_integrable;
  j["strict_tuning"] = rep.strict_tuning;
  j["r"] = rep.r;
  j["p"] = rep.p;
  j["strict_threshold"] = rep.strict_threshold;
  return j;
}

const std::vector<double>& series_for(const EnsembleStats& stats, Observable obs) {
  switch (obs) {
    case Observable::gap: return stats.mean_gap;
    case Observable::ergodic_gap: return stats.ergodic_gap;
    case Observable::dist_sq: return stats.mean_dist_sq;
    case Observable::dist_to_viscosity_sq: return stats.mean_dist_to_viscosity_sq;
    case Observable::lyapunov: return stats.mean_lyapunov;
  }
  throw ContractViolation("unknown observable");
}

}  // namespace

int run_simulate(const ExperimentConfig& cfg_in, const RunOptions& opts, std::ostream& log,
                 std::ostream& err) {
  try {
    ExperimentConfig cfg = cfg_in;
    if (opts.seed) cfg.ensemble.base_seed = *opts.seed;
    cfg.ensemble.n_threads = opts.threads;
    const fs::path dir = resolve_output_dir(cfg, opts);

    const ProblemSpec problem = make_problem(cfg.problem_name, cfg.problem_params);
    const AdmissibilityReport adm = check_admissibility(cfg.tikhonov, cfg.noise, problem);
    if (cfg.require_strict_tuning && !adm.strict_tuning) {
      err << "tikhonov.r: admissibility failure, hierarchical selection requires r > 2p/(2p+1)"
          << " (r=" << format_double(adm.r) << ", threshold=" << format_double(adm.strict_threshold)
          << ")\n";
      return kExitError;
    }

    IntegratorConfig icfg = cfg.integrator;
    if (icfg.record_times.empty())
      icfg.record_times = log_spaced_times(icfg.t0, icfg.horizon_T, cfg.n_record);
    // Needed whenever a fit asks for a viscosity observable.
    for (const FitSpec& f : cfg.fits)
      if (f.observable == Observable::dist_to_viscosity_sq || f.observable == Observable::lyapunov)
        icfg.record_viscosity = true;

    log << "simulate: problem=" << problem.name << " dim=" << problem.dim
        << " n_paths=" << cfg.ensemble.n_paths << " T=" << icfg.horizon_T << "\n";
    const EnsembleResult result =
        run_ensemble(problem, cfg.tikhonov, cfg.noise, icfg, cfg.ensemble);

    std::vector<NamedFit> fits;
    bool any_fail = false;
    for (const FitSpec& spec : cfg.fits) {
      NamedFit nf;
      nf.observable = to_string(spec.observable);
      auto [lo, hi] = spec.window ? *spec.window : default_fit_window(icfg.horizon_T);
      const double tol = spec.tolerance ? *spec.tolerance : default_fit_tolerance(cfg.noise);
      double predicted = kNaN;
      if (spec.predicted) {
        predicted = *spec.predicted;
      } else {
        const RatePrediction pred =
            theoretical_rate(problem, cfg.tikhonov, cfg.noise, spec.observable);
        if (pred.has_exponent) predicted = pred.exponent;
      }
      const std::vector<double>& series = series_for(result.stats, spec.observable);
      if (series.empty())
        throw ContractViolation("fit on " + nf.observable +
                                " requires record_viscosity and a smooth Tikhonov run");
      nf.fit = spec.semilog
                   ? fit_exponential_rate(result.stats.times, series, lo, hi, predicted, tol)
                   : fit_rate(result.stats.times, series, lo, hi, predicted, tol);
      nf.verdict = !nf.fit.has_prediction ? "no_prediction" : (nf.fit.pass ? "pass" : "fail");
      if (nf.verdict == "fail") any_fail = true;
      log << "  fit " << nf.observable << ": slope=" << format_double(nf.fit.fitted)
          << " predicted=" << format_double(nf.fit.predicted) << " -> " << nf.verdict << "\n";
      fits.push_back(nf);
    }

    write_ensemble_csv(dir / "ensemble.csv", result.stats);
    write_rates_csv(dir / "rates.csv", fits);

    json summary;
    summary["problem"] = problem.name;
    summary["admissibility"] = admissibility_json(adm);
    summary["n_paths"] = result.stats.n_paths;
    summary["n_diverged"] = result.stats.n_diverged;
    json jdiv = json::array();
    for (const auto& [idx, what] : result.divergences)
      jdiv.push_back({{"path", idx}, {"reason", what}});
    summary["divergences"] = jdiv;
    json jfits = json::array();
    for (const NamedFit& nf : fits)
      jfits.push_back({{"observable", nf.observable},
                       {"fitted", nf.fit.fitted},
                       {"stderr", nf.fit.stderr_},
                       {"predicted", nf.fit.predicted},
                       {"tolerance", nf.fit.tolerance},
                       {"verdict", nf.verdict}});
    summary["rate_fits"] = jfits;
    summary["config"] = to_json(cfg);
    std::ofstream(dir / "summary.json") << summary.dump(2) << "\n";

    if (result.stats.n_diverged > 0) {
      err << "simulate: " << result.stats.n_diverged << " path(s) diverged\n";
      return kExitVerdictFail;
    }
    return any_fail ? kExitVerdictFail : kExitPass;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

namespace {

void apply_sweep_value(ExperimentConfig& cfg, const std::string& param, const std::string& value) {
  auto as_double = [&]() {
    try {
      return std::stod(value);
    } catch (...) {
      throw ConfigError("sweep.values", "cannot parse '" + value + "' as a number");
    }
  };
  if (param == "r") {
    cfg.tikhonov = TikhonovSchedule::make_power(cfg.tikhonov.c, as_double(), cfg.tikhonov.t0);
  } else if (param == "alpha") {
    cfg.noise = NoiseSchedule::make_power(cfg.noise.sigma_star, as_double(), cfg.noise.t0,
                                          cfg.noise.state_coupling);
  } else if (param == "sigma_star") {
    cfg.noise.sigma_star = as_double();
    require(cfg.noise.sigma_star >= 0.0, "sweep: sigma_star must be >= 0");
  } else if (param == "h") {
    cfg.integrator.h = as_double();
    require(cfg.integrator.h > 0.0, "sweep: h must be > 0");
  } else if (param == "n_paths") {
    cfg.ensemble.n_paths = static_cast<int>(as_double());
    require(cfg.ensemble.n_paths >= 2, "sweep: n_paths must be >= 2");
  } else if (param == "p") {
    cfg.problem_params["p"] = as_double();
  } else {
    throw ConfigError("sweep.param",
                      "unknown parameter '" + param +
                          "' (expected one of r, alpha, sigma_star, h, n_paths, p)");
  }
}

}  // namespace

int run_sweep(const ExperimentConfig& cfg, const std::string& param,
              const std::vector<std::string>& values, const RunOptions& opts, std::ostream& log,
              std::ostream& err) {
  if (values.empty()) {
    err << "sweep.values: empty value list\n";
    return kExitError;
  }
  try {
    RunOptions base_opts = opts;
    const fs::path root = resolve_output_dir(cfg, opts);
    std::ofstream summary(root / "sweep_summary.csv");
    summary << "param,value,observable,window_lo,window_hi,fitted,stderr,predicted,verdict,"
               "exit_code\n";

    bool any_fail = false, any_error = false;
    for (const std::string& value : values) {
      ExperimentConfig point = cfg;
      int code;
      try {
        apply_sweep_value(point, param, value);
        const fs::path sub = root / (param + "_" + value);
        RunOptions popts = base_opts;
        popts.output_dir = sub.string();
        code = run_simulate(point, popts, log, err);
        if (code != kExitError) {
          // Join the per-point fits into the sweep summary.
          std::ifstream rates(sub / "rates.csv");
          std::string line;
          std::getline(rates, line);  // header
          while (std::getline(rates, line))
            summary << param << ',' << value << ',' << line << ',' << code << '\n';
        } else {
          summary << param << ',' << value << ",,,,,,,error," << code << '\n';
        }
      } catch (const std::exception& e) {
        err << "sweep point " << param << "=" << value << ": " << e.what() << "\n";
        code = kExitError;
        summary << param << ',' << value << ",,,,,,,error," << code << '\n';
      }
      any_fail |= code == kExitVerdictFail;
      any_error |= code == kExitError;
      log << "sweep " << param << "=" << value << " -> exit " << code << "\n";
    }
    if (any_error) return kExitError;
    return any_fail ? kExitVerdictFail : kExitPass;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int run_tikhonov_curve(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& log,
                       std::ostream& err) {
  try {
    const fs::path dir = resolve_output_dir(cfg, opts);
    const ProblemSpec problem = make_problem(cfg.problem_name, cfg.problem_params);
    std::vector<double> grid = cfg.curve.eps_grid;
    if (grid.empty()) {
      for (int i = 0; i < 26; ++i)
        grid.push_back(std::pow(10.0, -1.0 - 5.0 * i / 25.0));  // 1e-1 .. 1e-6
    }
    const TikhonovCurveStudy study = tikhonov_curve_study(problem, grid);

    std::ofstream out(dir / "tikhonov_curve.csv");
    out << "epsilon,norm_x_eps,dist_to_xstar\n";
    for (const TikhonovCurvePoint& pt : study.points)
      out << format_double(pt.epsilon) << ',' << format_double(pt.norm_x_eps) << ','
          << format_double(pt.dist_to_xstar) << '\n';

    json summary;
    summary["problem"] = problem.name;
    summary["degenerate"] = study.degenerate;
    summary["browder_ok"] = study.browder_ok;
    summary["fitted_slope"] = study.fitted_slope;
    summary["slope_threshold"] = study.slope_threshold;
    summary["verdict"] = study.pass ? "pass" : "fail";
    std::ofstream(dir / "summary.json") << summary.dump(2) << "\n";

    log << "tikhonov-curve: " << problem.name << (study.degenerate ? " (degenerate)" : "")
        << " slope=" << format_double(study.fitted_slope) << " -> "
        << (study.pass ? "pass" : "fail") << "\n";
    return study.pass ? kExitPass : kExitVerdictFail;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace sdiflow
