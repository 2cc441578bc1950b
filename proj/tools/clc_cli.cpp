#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "clc/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Collaborative label correction experiments"};
  app.set_version_flag("--version", "clc 0.1.0");
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "Train one configuration");
  run->add_option("--config", config_path, "JSON experiment config")->required();
  auto* out_opt = run->add_option("--out", out_dir, "Output directory (overrides the config)");
  auto* seed_opt = run->add_option("--seed", seed, "Master seed (overrides the config)");

  std::string sweep_dir;
  std::string sweep_out;
  std::size_t jobs = 1;
  auto* sw = app.add_subcommand("sweep", "Run every *.json config in a directory");
  sw->add_option("--dir", sweep_dir, "Directory of configs")->required()->check(CLI::ExistingDirectory);
  sw->add_option("--out", sweep_out, "Output root")->required();
  sw->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? clc::kExitOk : clc::kExitConfig;
  }

  if (*run) {
    clc::RunOverrides overrides;
    if (*out_opt) overrides.out = out_dir;
    if (*seed_opt) overrides.seed = seed;
    return clc::run_experiment(config_path, overrides, std::cout, std::cerr);
  }
  return clc::sweep(sweep_dir, sweep_out, jobs, std::cout, std::cerr);
}
