#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <cmath>
#include <sstream>

#include "sdiflow/experiment.hpp"

using namespace sdiflow;
namespace fs = std::filesystem;

namespace {

json small_config() {
  return json::parse(R"({
    "problem": {"name": "strongly_convex_quadratic", "params": {"dim": 2, "mu": 1.0}},
    "tikhonov": {"kind": "off"},
    "noise": {"kind": "constant", "sigma_star": 0.0},
    "integrator": {"scheme": "prox_em", "h": 0.01, "t0": 1.0, "T": 20.0, "n_record": 32},
    "ensemble": {"n_paths": 2, "base_seed": 7, "x0": {"kind": "constant", "value": [1.0, 0.0]}},
    "analysis": {"fits": []},
    "output_dir": "out"
  })");
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sdiflow_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config parsing, validation, and round-trip") {
  const ExperimentConfig cfg = parse_config(small_config());
  CHECK(cfg.problem_name == "strongly_convex_quadratic");
  CHECK(cfg.integrator.h == doctest::Approx(0.01));
  CHECK(cfg.ensemble.n_paths == 2);

  // Round-trip: serialize and re-parse to an equivalent configuration.
  const ExperimentConfig again = parse_config(to_json(cfg));
  CHECK(to_json(again) == to_json(cfg));

  SUBCASE("field-path errors") {
    json bad = small_config();
    bad["integrator"].erase("h");
    CHECK_THROWS_WITH_AS(parse_config(bad), "integrator.h: missing required number", ConfigError);

    bad = small_config();
    bad["noise"]["kind"] = "triangle";
    CHECK_THROWS_AS(parse_config(bad), ConfigError);

    bad = small_config();
    bad["ensemble"]["x0"]["value"] = {1.0};  // dimension mismatch
    CHECK_THROWS_AS(parse_config(bad), ConfigError);

    bad = small_config();
    bad["analysis"]["tikhonov_curve"] = {{"eps", {0.1, 0.0}}};  // zero entry
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
  }

  SUBCASE("problems are constructed from parameter tables") {
    const ProblemSpec dp = make_problem(
        "dist_power", json::parse(R"({"dim": 1, "p": 2.0, "lo": 1.0, "hi": 2.0})"));
    CHECK(dp.regularity.eb_exponent == doctest::Approx(2.0));
    const ProblemSpec ls = make_problem(
        "rank_deficient_ls", json::parse(R"({"a": [1, 0, 0, 0], "b": [2, 0]})"));
    CHECK(min_norm_solution(ls)[0] == doctest::Approx(2.0));
    CHECK_THROWS_AS(make_problem("unknown", json::object()), ConfigError);
  }
}

TEST_CASE("run_simulate writes reports and honors the exit-code contract") {
  std::ostringstream log, err;
  RunOptions opts;
  opts.threads = 2;

  SUBCASE("clean run exits 0 and emits the fixed CSV columns") {
    const fs::path dir = fresh_dir("sim_ok");
    opts.output_dir = dir.string();
    json j = small_config();
    j["noise"] = {{"kind", "power"}, {"sigma_star", 0.3}, {"alpha", 2.0}};
    j["integrator"]["T"] = 200.0;
    j["ensemble"]["n_paths"] = 8;
    j["analysis"]["fits"] = {{{"observable", "ergodic_gap"}, {"tolerance", 0.3}}};
    const int code = run_simulate(parse_config(j), opts, log, err);
    CHECK(code == kExitPass);
    CHECK(fs::exists(dir / "ensemble.csv"));
    CHECK(fs::exists(dir / "rates.csv"));
    CHECK(fs::exists(dir / "summary.json"));

    const std::string header = read_file(dir / "ensemble.csv").substr(0, 200);
    CHECK(header.rfind("t,mean_gap,se_gap,mean_dist_sq,se_dist_sq,ergodic_gap,mean_lyapunov,"
                       "n_paths",
                       0) == 0);
    const std::string rates = read_file(dir / "rates.csv");
    CHECK(rates.rfind("observable,window_lo,window_hi,fitted,stderr,predicted,verdict", 0) == 0);
    CHECK(rates.find("ergodic_gap") != std::string::npos);

    const json summary = json::parse(read_file(dir / "summary.json"));
    CHECK(summary["n_diverged"] == 0);
    CHECK(summary["admissibility"].contains("strict_tuning"));
  }

  SUBCASE("byte-identical reproducibility across runs") {
    const fs::path d1 = fresh_dir("repro1"), d2 = fresh_dir("repro2");
    json j = small_config();
    j["noise"] = {{"kind", "power"}, {"sigma_star", 0.5}, {"alpha", 1.5}};
    j["ensemble"]["n_paths"] = 6;
    opts.output_dir = d1.string();
    opts.threads = 1;
    CHECK(run_simulate(parse_config(j), opts, log, err) == kExitPass);
    opts.output_dir = d2.string();
    opts.threads = 2;  // thread count must not matter
    CHECK(run_simulate(parse_config(j), opts, log, err) == kExitPass);
    CHECK(read_file(d1 / "ensemble.csv") == read_file(d2 / "ensemble.csv"));
  }

  SUBCASE("seed override changes the output") {
    const fs::path d1 = fresh_dir("seed1"), d2 = fresh_dir("seed2");
    json j = small_config();
    j["noise"] = {{"kind", "constant"}, {"sigma_star", 0.4}};
    opts.output_dir = d1.string();
    CHECK(run_simulate(parse_config(j), opts, log, err) == kExitPass);
    opts.output_dir = d2.string();
    opts.seed = 12345;
    CHECK(run_simulate(parse_config(j), opts, log, err) == kExitPass);
    CHECK(read_file(d1 / "ensemble.csv") != read_file(d2 / "ensemble.csv"));
  }

  SUBCASE("verdict failure exits 2") {
    const fs::path dir = fresh_dir("sim_fail");
    opts.output_dir = dir.string();
    json j = small_config();
    // Deterministic strongly convex run decays exponentially; a power-law fit
    // against the -1 prediction cannot pass.
    j["analysis"]["fits"] = {
        {{"observable", "gap"}, {"predicted", -1.0}, {"tolerance", 0.05}, {"window", {2.0, 20.0}}}};
    CHECK(run_simulate(parse_config(j), opts, log, err) == kExitVerdictFail);
    const std::string rates = read_file(dir / "rates.csv");
    CHECK(rates.find("fail") != std::string::npos);
  }

  SUBCASE("strict-tuning assertion failure names the threshold condition") {
    const fs::path dir = fresh_dir("sim_adm");
    opts.output_dir = dir.string();
    json j = small_config();
    j["problem"] = {{"name", "rank_deficient_ls"}, {"params", {{"dim", 2}}}};
    j["ensemble"]["x0"]["value"] = {0.0, 0.0};
    j["tikhonov"] = {{"kind", "power"}, {"c", 1.0}, {"r", 0.5}, {"require_strict_tuning", true}};
    CHECK(run_simulate(parse_config(j), opts, log, err) == kExitError);
    CHECK(err.str().find("r > 2p/(2p+1)") != std::string::npos);
  }

  SUBCASE("viscosity observables reach the lyapunov CSV column") {
    const fs::path dir = fresh_dir("sim_lyap");
    opts.output_dir = dir.string();
    json j = small_config();
    j["problem"] = {{"name", "rank_deficient_ls"}, {"params", {{"dim", 2}}}};
    j["ensemble"]["x0"]["value"] = {0.0, 0.0};
    j["tikhonov"] = {{"kind", "power"}, {"c", 1.0}, {"r", 0.5}};
    j["integrator"]["T"] = 50.0;
    j["integrator"]["record_viscosity"] = true;
    CHECK(run_simulate(parse_config(j), opts, log, err) == kExitPass);
    std::ifstream in(dir / "ensemble.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(row.find("nan") == std::string::npos);  // lyapunov column populated
  }

  SUBCASE("SDIFLOW_OUTPUT_ROOT anchors relative output directories") {
    const fs::path root = fresh_dir("env_root");
    setenv("SDIFLOW_OUTPUT_ROOT", root.c_str(), 1);
    json j = small_config();
    j["output_dir"] = "nested/run";
    RunOptions env_opts;  // no output override: config path is relative
    env_opts.threads = 2;
    CHECK(run_simulate(parse_config(j), env_opts, log, err) == kExitPass);
    unsetenv("SDIFLOW_OUTPUT_ROOT");
    CHECK(fs::exists(root / "nested" / "run" / "ensemble.csv"));
  }

  SUBCASE("divergent paths are flagged and fail the run") {
    const fs::path dir = fresh_dir("sim_div");
    opts.output_dir = dir.string();
    json j = json::parse(R"({
      "problem": {"name": "quartic_valley", "params": {"dim": 1}},
      "tikhonov": {"kind": "off"},
      "noise": {"kind": "constant", "sigma_star": 0.0},
      "integrator": {"h": 0.00275, "t0": 1.0, "T": 3.0, "n_record": 8},
      "ensemble": {"n_paths": 8, "base_seed": 77,
                   "x0": {"kind": "gaussian", "mean": [27.0], "scale": 4.0}},
      "output_dir": "out"
    })");
    CHECK(run_simulate(parse_config(j), opts, log, err) == kExitVerdictFail);
    const json summary = json::parse(read_file(dir / "summary.json"));
    CHECK(summary["n_diverged"].get<int>() >= 1);
  }
}

TEST_CASE("run_sweep joins fitted and predicted exponents per point") {
  std::ostringstream log, err;
  RunOptions opts;
  opts.threads = 2;
  const fs::path dir = fresh_dir("sweep");
  opts.output_dir = dir.string();

  json j = small_config();
  j["problem"] = {{"name", "rank_deficient_ls"}, {"params", {{"dim", 2}}}};
  j["ensemble"]["x0"]["value"] = {0.0, 0.0};
  j["ensemble"]["n_paths"] = 4;
  j["noise"] = {{"kind", "power"}, {"sigma_star", 0.3}, {"alpha", 2.0}};
  j["integrator"]["T"] = 100.0;
  j["analysis"]["fits"] = {{{"observable", "ergodic_gap"}, {"tolerance", 0.5}}};

  const int code = run_sweep(parse_config(j), "sigma_star", {"0.2", "0.4"}, opts, log, err);
  CHECK(code == kExitPass);
  CHECK(fs::exists(dir / "sigma_star_0.2" / "rates.csv"));
  CHECK(fs::exists(dir / "sigma_star_0.4" / "rates.csv"));
  const std::string summary = read_file(dir / "sweep_summary.csv");
  CHECK(summary.rfind("param,value,observable", 0) == 0);
  CHECK(summary.find("sigma_star,0.2,ergodic_gap") != std::string::npos);
  CHECK(summary.find("sigma_star,0.4,ergodic_gap") != std::string::npos);

  // Unknown parameters fail fast.
  CHECK(run_sweep(parse_config(j), "granularity", {"1"}, opts, log, err) == kExitError);

  // Sweeping h on a deterministic run: terminal error halves with the step.
  json jh = small_config();
  jh["ensemble"]["x0"]["value"] = {3.0, 0.0};
  jh["integrator"]["T"] = 10.0;
  jh["analysis"]["fits"] = json::array();
  const fs::path dirh = fresh_dir("sweep_h");
  opts.output_dir = dirh.string();
  CHECK(run_sweep(parse_config(jh), "h", {"0.01", "0.005"}, opts, log, err) == kExitPass);
  const double exact = 9.0 * std::exp(-2.0 * (10.0 - 1.0));
  auto terminal_dist_sq = [&](const std::string& sub) {
    std::ifstream in(dirh / sub / "ensemble.csv");
    std::string line, last;
    std::getline(in, line);  // header
    while (std::getline(in, line))
      if (!line.empty()) last = line;
    // column 4 is mean_dist_sq
    std::stringstream ss(last);
    std::string cell;
    for (int i = 0; i < 4; ++i) std::getline(ss, cell, ',');
    return std::stod(cell);
  };
  const double e1 = std::abs(terminal_dist_sq("h_0.01") - exact);
  const double e2 = std::abs(terminal_dist_sq("h_0.005") - exact);
  CHECK(e1 / e2 >= 1.7);
  CHECK(e1 / e2 <= 2.3);

  // Strict-tuning flags across an r sweep: {false, true, true} for p = 2.
  json jr = j;
  jr["tikhonov"] = {{"kind", "power"}, {"c", 1.0}, {"r", 0.9}};
  jr["analysis"]["fits"] = json::array();
  const fs::path dir2 = fresh_dir("sweep_r");
  opts.output_dir = dir2.string();
  CHECK(run_sweep(parse_config(jr), "r", {"0.7", "0.85", "0.95"}, opts, log, err) == kExitPass);
  const std::array<std::pair<const char*, bool>, 3> expect = {
      {{"r_0.7", false}, {"r_0.85", true}, {"r_0.95", true}}};
  for (const auto& [sub, strict] : expect) {
    const json s = json::parse(read_file(dir2 / sub / "summary.json"));
    CHECK(s["admissibility"]["strict_tuning"].get<bool>() == strict);
  }
}

TEST_CASE("run_tikhonov_curve") {
  std::ostringstream log, err;
  RunOptions opts;

  SUBCASE("rank-deficient LS passes on the default grid") {
    const fs::path dir = fresh_dir("curve_ls");
    opts.output_dir = dir.string();
    json j = small_config();
    j["problem"] = {{"name", "rank_deficient_ls"}, {"params", {{"dim", 2}}}};
    j["ensemble"].erase("x0");
    CHECK(run_tikhonov_curve(parse_config(j), opts, log, err) == kExitPass);
    const std::string csv = read_file(dir / "tikhonov_curve.csv");
    CHECK(csv.rfind("epsilon,norm_x_eps,dist_to_xstar", 0) == 0);
    const json s = json::parse(read_file(dir / "summary.json"));
    CHECK(s["verdict"] == "pass");
    CHECK(s["fitted_slope"].get<double>() > 0.9);
  }

  SUBCASE("origin-centered quadratic reports the degenerate flag") {
    const fs::path dir = fresh_dir("curve_degenerate");
    opts.output_dir = dir.string();
    CHECK(run_tikhonov_curve(parse_config(small_config()), opts, log, err) == kExitPass);
    const json s = json::parse(read_file(dir / "summary.json"));
    CHECK(s["degenerate"].get<bool>());
  }
}

TEST_CASE("format_double uses 17 significant digits") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0 / 3.0) == "0.66666666666666663");
}
