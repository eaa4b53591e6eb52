#pragma once

#include "phdae/config.hpp"

#include <iosfwd>

namespace phdae {

/// Exit codes shared by the command-line tools.
enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_structure = 2, exit_integration = 3 };

/// Structure report for `model_path` or the builtin named by `scenario`.
/// 0 on pass, 2 on a structure failure, 1 on I/O or parse errors.
int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Integrates the scenario and writes one CSV row per step endpoint, starting with t0.
/// 3 on integration failure, after flushing the rows written so far.
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);

/// End-state errors for each h in `h_list` (at least three) against a fine reference, or
/// the exact solution when the scenario has one, and the fitted order.
int cmd_convergence(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Formats values with 17 significant digits, comma separated, LF terminated.
std::string csv_line(const std::vector<double>& values);

}  // namespace phdae
