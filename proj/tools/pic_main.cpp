#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace pic::cli;

  CLI::App app{"Prescribed performance / input constraint controller toolkit"};
  app.require_subcommand(1);

  std::string config;
  std::string grid_text;
  std::string builtin = "pendulum_ex1";
  CommandOptions opts;
  std::string out_dir = ".";

  auto* check = app.add_subcommand("check", "Certify a scenario's constraints");
  check->add_option("config", config, "Scenario JSON file")->required();

  auto* sim = app.add_subcommand("simulate", "Simulate the closed loop and monitor bounds");
  sim->add_option("config", config, "Scenario JSON file")->required();
  sim->add_option("--out", out_dir, "Output directory");
  sim->add_option("--step", opts.step, "Recording step in seconds");
  sim->add_option("--horizon", opts.horizon, "Simulated time in seconds");
  sim->add_flag("--permissive", opts.permissive,
                "Run even if uncertified or starting outside a funnel");

  auto* region = app.add_subcommand("region", "Sweep the feasible initial-state region");
  region->add_option("config", config, "Scenario JSON file")->required();
  region->add_option("--out", out_dir, "Output directory");
  region->add_option("--grid", grid_text, "Grid resolution as <nx>x<ny>");

  auto* dump = app.add_subcommand("dump-defaults", "Print a bundled scenario config");
  dump->add_option("name", builtin, "pendulum_ex1 or nonlinear_ex2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  opts.out_dir = out_dir;
  if (!grid_text.empty()) {
    opts.grid = parse_grid(grid_text);
    if (!opts.grid) {
      std::cerr << "error: --grid expects <nx>x<ny>, got '" << grid_text << "'\n";
      return kExitConfig;
    }
  }

  if (*check) return cmd_check(config, std::cout, std::cerr);
  if (*sim) return cmd_simulate(config, opts, std::cout, std::cerr);
  if (*region) return cmd_region(config, opts, std::cout, std::cerr);
  return cmd_dump_defaults(builtin, std::cout, std::cerr);
}
