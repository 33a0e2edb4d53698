#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "grinder/config.hpp"
#include "grinder/error.hpp"
#include "grinder/harness.hpp"
#include "grinder/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulation lab for online strategic classification"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::size_t workers = 0;
  auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
  run->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--workers", workers, "Concurrent repetitions (overrides the config)")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "Output directory (overrides the config)");

  std::string suite;
  auto* verify = app.add_subcommand("verify", "Run a property suite and print a JSON report");
  verify->add_option("--suite", suite, "Suite name (see list-suites)")->required();

  auto* list = app.add_subcommand("list-suites", "List registered property suites");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      grinder::ExperimentConfig config = grinder::load_config(config_path);
      if (!out_dir.empty()) config.output = out_dir;
      if (workers > 0) config.workers = workers;
      const auto result = grinder::run_experiment(config);
      std::cout << "wrote " << result.runs.size() << " runs to " << config.output.string()
                << (result.partial ? " (partial: see runs.csv)" : "") << '\n';
      return result.partial ? 3 : 0;
    }
    if (*verify) {
      const auto report = grinder::verify_suite(suite);
      std::cout << report.to_json() << '\n';
      return report.passed() ? 0 : 1;
    }
    if (*list) {
      for (const auto& name : grinder::list_suites()) std::cout << name << '\n';
      return 0;
    }
  } catch (const grinder::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
