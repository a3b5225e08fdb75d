#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dgair/config.hpp"

namespace dgair {

enum ExitCode : int {
  kExitSuccess = 0,
  kExitUsage = 1,      ///< usage or configuration error
  kExitNumerical = 2,  ///< blow-up, non-convergence
  kExitProbe = 3,      ///< a verification probe failed
};

struct ProbeRow {
  std::string name;
  enum class Status { pass, fail, skip } status = Status::pass;
  double value = 0.0;
  std::string criterion;
  std::string detail;
};

struct ProbeReport {
  std::vector<ProbeRow> rows;
  bool all_passed() const;
};

/// Coercivity scan, upwind nonnegativity, consistency residual and local
/// conservation on the configured mesh, degree and penalty.
ProbeReport run_probes(const RunConfig& cfg);
std::string format_probe_report(const ProbeReport& report);

/// Commands write into cfg.output.directory and log progress to `log`.
/// They throw on failure; run_command maps exceptions to exit codes.
int cmd_solve(const RunConfig& cfg, std::ostream& log);
int cmd_convergence(const RunConfig& cfg, std::ostream& log);
int cmd_probe(const RunConfig& cfg, std::ostream& log);

struct CommandOverrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
};

/// Loads the config, applies overrides and runs `command` (solve, convergence
/// or probe). Diagnostics go to `err`.
int run_command(std::string_view command, const std::string& config_path, const CommandOverrides& overrides,
                std::ostream& log, std::ostream& err);

}  // namespace dgair
