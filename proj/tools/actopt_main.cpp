#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "actopt/catalog.hpp"
#include "actopt/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Actuator placement and shape optimization for controlled diffusion"};
  app.require_subcommand(1);

  std::string run_config;
  CLI::App* run = app.add_subcommand("run", "Run the scenario described by a config file");
  run->add_option("config", run_config, "Scenario file (key = value)")->required();

  CLI::App* catalog =
      app.add_subcommand("catalog", "List built-in initial conditions and diffusion profiles");

  std::string validate_config;
  CLI::App* validate = app.add_subcommand("validate", "Check a config file against the schema");
  validate->add_option("config", validate_config, "Scenario file (key = value)")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return actopt::run_scenario(run_config);
  if (catalog->parsed()) {
    std::cout << actopt::list_catalog();
    return 0;
  }
  if (validate->parsed()) return actopt::validate_scenario(validate_config);
  return 1;
}
