#include <CLI11.hpp>

#include <iostream>

#include "sdiflow/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stochastic subgradient-flow simulator with Tikhonov regularization"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::string sweep_param;
  std::string sweep_values;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;

  app.add_option("--threads", threads, "worker threads for path simulation (0 = all cores)");
  app.add_option("--output", output_dir, "output directory (overrides config)");
  auto* seed_opt = app.add_option("--seed", seed, "base RNG seed (overrides config)");

  CLI::App* sim = app.add_subcommand("simulate", "run one ensemble and emit reports");
  sim->add_option("config", config_path, "experiment config file (JSON)")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "run a 1-D parameter sweep");
  sweep->add_option("config", config_path, "experiment config file (JSON)")->required();
  sweep->add_option("--param", sweep_param, "parameter: r, alpha, sigma_star, h, n_paths, p")
      ->required();
  sweep->add_option("--values", sweep_values, "comma-separated value list")->required();

  CLI::App* curve = app.add_subcommand("tikhonov-curve", "viscosity-curve study");
  curve->add_option("config", config_path, "experiment config file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? sdiflow::kExitError : sdiflow::kExitPass;
  }
  seed_set = seed_opt->count() > 0;

  sdiflow::RunOptions opts;
  if (!output_dir.empty()) opts.output_dir = output_dir;
  if (seed_set) opts.seed = seed;
  opts.threads = threads;

  sdiflow::ExperimentConfig cfg;
  try {
    cfg = sdiflow::load_config_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return sdiflow::kExitError;
  }

  if (sim->parsed()) return sdiflow::run_simulate(cfg, opts, std::cout, std::cerr);
  if (curve->parsed()) return sdiflow::run_tikhonov_curve(cfg, opts, std::cout, std::cerr);
  if (sweep->parsed()) {
    std::vector<std::string> values;
    std::string cur;
    for (char c : sweep_values) {
      if (c == ',') {
        if (!cur.empty()) values.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) values.push_back(cur);
    return sdiflow::run_sweep(cfg, sweep_param, values, opts, std::cout, std::cerr);
  }
  return sdiflow::kExitError;
}
