#include "sdiflow/config.hpp"

#include <fstream>

namespace sdiflow {

namespace {

const json* find(const json& j, const std::string& key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double get_number(const json& j, const std::string& path, const std::string& key,
                  std::optional<double> fallback = std::nullopt) {
  const json* v = find(j, key);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError(path + "." + key, "missing required number");
  }
  if (!v->is_number()) throw ConfigError(path + "." + key, "expected a number");
  return v->get<double>();
}

std::string get_string(const json& j, const std::string& path, const std::string& key,
                       std::optional<std::string> fallback = std::nullopt) {
  const json* v = find(j, key);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError(path + "." + key, "missing required string");
  }
  if (!v->is_string()) throw ConfigError(path + "." + key, "expected a string");
  return v->get<std::string>();
}

bool get_bool(const json& j, const std::string& path, const std::string& key, bool fallback) {
  const json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError(path + "." + key, "expected a boolean");
  return v->get<bool>();
}

Vec get_vector(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(path, "expected an array of numbers");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

}  // namespace

ProblemSpec make_problem(const std::string& name, const json& params) {
  const std::string path = "problem.params";
  if (!params.is_object() && !params.is_null())
    throw ConfigError("problem.params", "expected a table");
  const json p = params.is_null() ? json::object() : params;
  const int dim = static_cast<int>(get_number(p, path, "dim", 0.0));

  try {
    if (name == "rank_deficient_ls") {
      if (const json* a = find(p, "a")) {
        const json* bj = find(p, "b");
        if (!bj) throw ConfigError(path + ".b", "required alongside a");
        const Vec b = get_vector(*bj, path + ".b");
        const Vec flat = get_vector(*a, path + ".a");  // row-major
        const int rows = static_cast<int>(b.size());
        const int cols = static_cast<int>(flat.size()) / rows;
        if (rows * cols != static_cast<int>(flat.size()))
          throw ConfigError(path + ".a", "row-major length must be rows*cols");
        Mat A(rows, cols);
        for (int i = 0; i < rows; ++i)
          for (int j = 0; j < cols; ++j) A(i, j) = flat[i * cols + j];
        return make_rank_deficient_ls(A, b);
      }
      return make_rank_deficient_ls(dim > 0 ? dim : 2);
    }
    if (name == "strongly_convex_quadratic") {
      const double mu = get_number(p, path, "mu", 1.0);
      if (const json* c = find(p, "center"))
        return make_strongly_convex_quadratic(mu, get_vector(*c, path + ".center"));
      return make_strongly_convex_quadratic(dim > 0 ? dim : 10, mu);
    }
    if (name == "l1_quadratic") {
      const double lam = get_number(p, path, "lambda_l1", 1.0);
      if (const json* c = find(p, "center"))
        return make_l1_quadratic(lam, get_vector(*c, path + ".center"));
      return make_l1_quadratic(dim > 0 ? dim : 10, lam);
    }
    if (name == "dist_power") {
      const double pe = get_number(p, path, "p", 2.0);
      const double lo = get_number(p, path, "lo", 1.0);
      const double hi = get_number(p, path, "hi", 2.0);
      return make_dist_power(dim > 0 ? dim : 1, pe, lo, hi);
    }
    if (name == "quartic_valley") {
      const double b = get_number(p, path, "b", 1.0);
      if (const json* a = find(p, "a")) return make_quartic_valley(get_vector(*a, path + ".a"), b);
      return make_quartic_valley(dim > 0 ? dim : 2, b);
    }
  } catch (const ContractViolation& e) {
    throw ConfigError("problem.params", e.what());
  }
  throw ConfigError("problem.name", "unknown problem '" + name + "'");
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "config must be a table");
  ExperimentConfig cfg;

  const json* prob = find(j, "problem");
  if (!prob || !prob->is_object()) throw ConfigError("problem", "missing problem table");
  cfg.problem_name = get_string(*prob, "problem", "name");
  cfg.problem_params = prob->contains("params") ? prob->at("params") : json::object();

  // Integrator first: schedules default their t0 from it.
  const json integ = j.contains("integrator") ? j.at("integrator") : json::object();
  const std::string scheme = get_string(integ, "integrator", "scheme", std::string("prox_em"));
  if (scheme == "prox_em")
    cfg.integrator.scheme = Scheme::prox_em;
  else if (scheme == "yosida_em")
    cfg.integrator.scheme = Scheme::yosida_em;
  else
    throw ConfigError("integrator.scheme", "expected 'prox_em' or 'yosida_em'");
  cfg.integrator.h = get_number(integ, "integrator", "h");
  cfg.integrator.t0 = get_number(integ, "integrator", "t0", 1.0);
  cfg.integrator.horizon_T = get_number(integ, "integrator", "T");
  cfg.integrator.lambda = get_number(integ, "integrator", "lambda", 1e-2);
  cfg.n_record = static_cast<int>(get_number(integ, "integrator", "n_record", 64.0));
  cfg.integrator.record_viscosity =
      get_bool(integ, "integrator", "record_viscosity", false);
  if (cfg.integrator.h <= 0.0) throw ConfigError("integrator.h", "must be > 0");
  if (cfg.integrator.t0 <= 0.0) throw ConfigError("integrator.t0", "must be > 0");
  if (cfg.integrator.horizon_T <= cfg.integrator.t0)
    throw ConfigError("integrator.T", "must exceed t0");
  if (cfg.n_record < 2) throw ConfigError("integrator.n_record", "must be >= 2");

  const json tik = j.contains("tikhonov") ? j.at("tikhonov") : json::object();
  const std::string tk = get_string(tik, "tikhonov", "kind", std::string("off"));
  const double tik_t0 = get_number(tik, "tikhonov", "t0", cfg.integrator.t0);
  try {
    if (tk == "off")
      cfg.tikhonov = TikhonovSchedule::make_off(tik_t0);
    else if (tk == "power")
      cfg.tikhonov = TikhonovSchedule::make_power(get_number(tik, "tikhonov", "c", 1.0),
                                                  get_number(tik, "tikhonov", "r"), tik_t0);
    else
      throw ConfigError("tikhonov.kind", "expected 'off' or 'power'");
  } catch (const ContractViolation& e) {
    throw ConfigError("tikhonov", e.what());
  }
  cfg.require_strict_tuning = get_bool(tik, "tikhonov", "require_strict_tuning", false);

  const json noi = j.contains("noise") ? j.at("noise") : json::object();
  const std::string nk = get_string(noi, "noise", "kind", std::string("constant"));
  const double noise_t0 = get_number(noi, "noise", "t0", cfg.integrator.t0);
  const double coupling = get_number(noi, "noise", "state_coupling", 0.0);
  try {
    if (nk == "constant")
      cfg.noise = NoiseSchedule::make_constant(get_number(noi, "noise", "sigma_star", 0.0),
                                               noise_t0, coupling);
    else if (nk == "power")
      cfg.noise = NoiseSchedule::make_power(get_number(noi, "noise", "sigma_star"),
                                            get_number(noi, "noise", "alpha"), noise_t0, coupling);
    else
      throw ConfigError("noise.kind", "expected 'constant' or 'power'");
  } catch (const ContractViolation& e) {
    throw ConfigError("noise", e.what());
  }

  const json ens = j.contains("ensemble") ? j.at("ensemble") : json::object();
  cfg.ensemble.n_paths = static_cast<int>(get_number(ens, "ensemble", "n_paths", 2.0));
  if (cfg.ensemble.n_paths < 2) throw ConfigError("ensemble.n_paths", "must be >= 2");
  cfg.ensemble.base_seed =
      static_cast<std::uint64_t>(get_number(ens, "ensemble", "base_seed", 0.0));
  const ProblemSpec probe = make_problem(cfg.problem_name, cfg.problem_params);
  if (const json* x0 = find(ens, "x0")) {
    if (!x0->is_object()) throw ConfigError("ensemble.x0", "expected a table");
    const std::string kind = get_string(*x0, "ensemble.x0", "kind", std::string("constant"));
    if (kind == "constant") {
      const json* v = find(*x0, "value");
      if (!v) throw ConfigError("ensemble.x0.value", "missing required array");
      cfg.ensemble.init = InitialState::constant(get_vector(*v, "ensemble.x0.value"));
    } else if (kind == "gaussian") {
      const json* mean = find(*x0, "mean");
      if (!mean) throw ConfigError("ensemble.x0.mean", "missing required array");
      cfg.ensemble.init = InitialState::gaussian(get_vector(*mean, "ensemble.x0.mean"),
                                                 get_number(*x0, "ensemble.x0", "scale", 1.0));
    } else {
      throw ConfigError("ensemble.x0.kind", "expected 'constant' or 'gaussian'");
    }
    if (cfg.ensemble.init.value.size() != probe.dim)
      throw ConfigError("ensemble.x0", "dimension mismatch with problem (dim " +
                                           std::to_string(probe.dim) + ")");
  } else {
    cfg.ensemble.init = InitialState::constant(Vec::Zero(probe.dim));
  }

  const json ana = j.contains("analysis") ? j.at("analysis") : json::object();
  if (const json* fits = find(ana, "fits")) {
    if (!fits->is_array()) throw ConfigError("analysis.fits", "expected an array");
    for (std::size_t i = 0; i < fits->size(); ++i) {
      const std::string path = "analysis.fits[" + std::to_string(i) + "]";
      const json& f = (*fits)[i];
      if (!f.is_object()) throw ConfigError(path, "expected a table");
      FitSpec spec;
      try {
        spec.observable = observable_from_string(get_string(f, path, "observable"));
      } catch (const ContractViolation& e) {
        throw ConfigError(path + ".observable", e.what());
      }
      if (const json* w = find(f, "window")) {
        if (!w->is_array() || w->size() != 2 || !(*w)[0].is_number() || !(*w)[1].is_number())
          throw ConfigError(path + ".window", "expected [lo, hi]");
        spec.window = std::make_pair((*w)[0].get<double>(), (*w)[1].get<double>());
        if (!(spec.window->first < spec.window->second))
          throw ConfigError(path + ".window", "need lo < hi");
      }
      if (find(f, "tolerance")) spec.tolerance = get_number(f, path, "tolerance");
      if (find(f, "predicted")) spec.predicted = get_number(f, path, "predicted");
      spec.semilog = get_bool(f, path, "semilog", false);
      cfg.fits.push_back(spec);
    }
  }
  if (const json* curve = find(ana, "tikhonov_curve")) {
    if (!curve->is_object()) throw ConfigError("analysis.tikhonov_curve", "expected a table");
    if (const json* grid = find(*curve, "eps")) {
      if (!grid->is_array()) throw ConfigError("analysis.tikhonov_curve.eps", "expected an array");
      for (const auto& e : *grid) {
        if (!e.is_number())
          throw ConfigError("analysis.tikhonov_curve.eps", "expected an array of numbers");
        const double v = e.get<double>();
        if (!(v > 0.0))
          throw ConfigError("analysis.tikhonov_curve.eps", "grid entries must be > 0");
        cfg.curve.eps_grid.push_back(v);
      }
    } else {
      const double lo = get_number(*curve, "analysis.tikhonov_curve", "eps_lo", 1e-6);
      const double hi = get_number(*curve, "analysis.tikhonov_curve", "eps_hi", 1e-1);
      const int n = static_cast<int>(get_number(*curve, "analysis.tikhonov_curve", "n", 26.0));
      if (!(lo > 0.0 && hi > lo))
        throw ConfigError("analysis.tikhonov_curve", "need 0 < eps_lo < eps_hi");
      if (n < 2) throw ConfigError("analysis.tikhonov_curve.n", "must be >= 2");
      for (int i = 0; i < n; ++i)
        cfg.curve.eps_grid.push_back(
            std::exp(std::log(hi) + (std::log(lo) - std::log(hi)) * i / (n - 1)));
    }
  }

  cfg.output_dir = get_string(j, "<root>", "output_dir", std::string("out"));
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("JSON parse error: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["problem"] = {{"name", cfg.problem_name}, {"params", cfg.problem_params}};
  json tik;
  tik["kind"] = cfg.tikhonov.is_off() ? "off" : "power";
  tik["c"] = cfg.tikhonov.c;
  tik["r"] = cfg.tikhonov.r;
  tik["t0"] = cfg.tikhonov.t0;
  tik["require_strict_tuning"] = cfg.require_strict_tuning;
  j["tikhonov"] = tik;
  json noi;
  noi["kind"] = cfg.noise.kind == NoiseSchedule::Kind::constant ? "constant" : "power";
  noi["sigma_star"] = cfg.noise.sigma_star;
  noi["alpha"] = cfg.noise.alpha;
  noi["t0"] = cfg.noise.t0;
  noi["state_coupling"] = cfg.noise.state_coupling;
  j["noise"] = noi;
  json integ;
  integ["scheme"] = cfg.integrator.scheme == Scheme::prox_em ? "prox_em" : "yosida_em";
  integ["h"] = cfg.integrator.h;
  integ["t0"] = cfg.integrator.t0;
  integ["T"] = cfg.integrator.horizon_T;
  integ["lambda"] = cfg.integrator.lambda;
  integ["n_record"] = cfg.n_record;
  integ["record_viscosity"] = cfg.integrator.record_viscosity;
  j["integrator"] = integ;
  json ens;
  ens["n_paths"] = cfg.ensemble.n_paths;
  ens["base_seed"] = cfg.ensemble.base_seed;
  json x0;
  x0["kind"] = cfg.ensemble.init.kind == InitialState::Kind::constant ? "constant" : "gaussian";
  std::vector<double> vals(cfg.ensemble.init.value.data(),
                           cfg.ensemble.init.value.data() + cfg.ensemble.init.value.size());
  if (cfg.ensemble.init.kind == InitialState::Kind::constant) {
    x0["value"] = vals;
  } else {
    x0["mean"] = vals;
    x0["scale"] = cfg.ensemble.init.scale;
  }
  ens["x0"] = x0;
  j["ensemble"] = ens;
  json ana;
  json fits = json::array();
  for (const FitSpec& f : cfg.fits) {
    json spec;
    spec["observable"] = to_string(f.observable);
    if (f.window) spec["window"] = {f.window->first, f.window->second};
    if (f.tolerance) spec["tolerance"] = *f.tolerance;
    if (f.predicted) spec["predicted"] = *f.predicted;
    if (f.semilog) spec["semilog"] = true;
    fits.push_back(spec);
  }
  ana["fits"] = fits;
  if (!cfg.curve.eps_grid.empty()) ana["tikhonov_curve"] = {{"eps", cfg.curve.eps_grid}};
  j["analysis"] = ana;
  j["output_dir"] = cfg.output_dir;
  return j;
}

std::pair<double, double> default_fit_window(double T) { return {T / 31.6, T}; }

double default_fit_tolerance(const NoiseSchedule& noise) { return noise.is_zero() ? 0.05 : 0.15; }

}  // namespace sdiflow
