#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dgair/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"DG solver for the 2D advection-diffusion-reaction air pollution model"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  for (const char* name : {"solve", "convergence", "probe"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "INI configuration file")->required();
    sub->add_option("--out", out, "output directory (overrides [output] directory)");
    sub->add_option("--seed", seed, "random seed (overrides [run] seed)");
  }
  app.get_subcommand("solve")->description("run the time integration, write VTK and observers.csv");
  app.get_subcommand("convergence")->description("run a mesh refinement study, write convergence.csv");
  app.get_subcommand("probe")->description("run the verification probes, write probe_report.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? dgair::kExitSuccess : dgair::kExitUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  return dgair::run_command(command, config, {out, seed}, std::cout, std::cerr);
}
