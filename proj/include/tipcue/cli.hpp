#pragma once

#include <string>
#include <vector>

#include "tipcue/model.hpp"

namespace tipcue {

/// Runs the command line. Returns 0 on success, 1 on a runtime failure and
/// 2 on a configuration or parse failure.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

/// Entries, totals and phase counts of a schedule document written by the
/// `schedule` command. Throws ConfigError on malformed input.
Schedule parse_schedule_json(const std::string& text);

}  // namespace tipcue
