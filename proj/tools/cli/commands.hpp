#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace bumpforge::cli {

enum ExitCode : int {
    kSuccess = 0,
    kNumericFailure = 1,
    kAssumptionFailure = 2,
    kNonConvergence = 3,
    kConfigError = 64,
    kDataError = 65,
};

struct CommandOptions {
    std::string out_dir;  ///< empty: use output.dir from the config
    std::string profile;
    std::optional<std::vector<double>> betas;
    std::optional<double> beta;
    unsigned threads = 1;
};

/// Each command writes its artifacts under the output directory, prints a
/// short JSON summary to `out` and diagnostics to `err`, and returns an exit code.
int cmd_solve_limit(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_refine(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep_beta(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_shoot(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Full command line entry point (argv[0] is the program name).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Parses "25,50,100" (empty text gives an empty list).
std::vector<double> parse_beta_list(const std::string& text);

/// BUMPFORGE_THREADS if set to a positive integer, else the hardware concurrency.
unsigned thread_budget();

}  // namespace bumpforge::cli
