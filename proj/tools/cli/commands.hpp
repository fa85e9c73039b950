#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <utility>

namespace pic::cli {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitInfeasible = 1,  ///< verdict infeasible, or monitored bounds violated
  kExitConfig = 2,      ///< unreadable or invalid configuration
  kExitRuntime = 3,     ///< simulation failed (blow-up, I/O)
};

struct CommandOptions {
  std::filesystem::path out_dir = ".";
  std::optional<double> step;
  std::optional<double> horizon;
  std::optional<std::pair<std::size_t, std::size_t>> grid;
  bool permissive = false;
};

/// Parses "<nx>x<ny>"; returns nullopt on malformed text.
std::optional<std::pair<std::size_t, std::size_t>> parse_grid(std::string_view text);

int cmd_check(const std::filesystem::path& config, std::ostream& out,
              std::ostream& err);

int cmd_simulate(const std::filesystem::path& config, const CommandOptions& opts,
                 std::ostream& out, std::ostream& err);

int cmd_region(const std::filesystem::path& config, const CommandOptions& opts,
               std::ostream& out, std::ostream& err);

/// Prints the bundled configuration for `name` (pendulum_ex1, nonlinear_ex2).
int cmd_dump_defaults(std::string_view name, std::ostream& out, std::ostream& err);

}  // namespace pic::cli
