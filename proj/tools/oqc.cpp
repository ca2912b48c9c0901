#include <iostream>

#include <CLI11.hpp>

#include "oqc/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Lindblad simulation and optimal control"};
  std::string mode_name;
  std::string config_path;
  std::string output_dir = "out";
  std::optional<std::string> params;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  app.add_option("mode", mode_name, "simulate | optimize | gradient-check | evaluate")->required();
  app.add_option("--config", config_path, "problem definition (key = value)")->required();
  app.add_option("--output", output_dir, "directory for CSV and parameter files");
  app.add_option("--workers", workers, "parallel workers over initial states");
  app.add_option("--params", params, "control parameter file");
  app.add_option("--seed", seed, "seed for the random initial guess");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : oqc::exit_code::config_error;
  }

  oqc::Mode mode;
  oqc::RunConfig config;
  try {
    mode = oqc::parse_mode(mode_name);
    config = oqc::parse_config(config_path);
  } catch (const oqc::InvalidSpec& e) {
    std::cerr << "error: " << e.what() << '\n';
    return oqc::exit_code::config_error;
  }

  oqc::RunOptions options;
  options.output_dir = output_dir;
  if (params) options.params = *params;
  options.workers = workers;
  options.seed = seed;
  return oqc::run(mode, std::move(config), options, std::cerr).exit_code;
}
