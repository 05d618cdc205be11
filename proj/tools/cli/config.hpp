#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bumpforge/firing_rates.hpp"
#include "bumpforge/kernels.hpp"

namespace bumpforge::cli {

/// A scenario file: `[section]` headers and `key = value` lines, where a
/// value is a number, `inf`, `true`/`false`, a double-quoted string or a
/// bracketed list of numbers. `#` starts a comment.
struct ScenarioConfig {
    std::string kernel_family;  // exponential | wizard_hat | diff_gaussians
    double kernel_k = 0.0;
    std::optional<double> kernel_K, kernel_M, kernel_m;

    std::string firing_family = "hill";  // hill | logistic | step
    double firing_beta = 100.0;
    double firing_h = 0.0;
    double firing_p = 2.0;
    bool allow_logistic = false;

    int bump_N = 1;
    std::vector<double> initial_guess;

    int grid_M = 1025;
    double grid_delta = 0.5;

    int max_iters = 50;
    double tol = 1e-10;
    bool exact_pn = false;

    double residual_bound = 1e-7;

    double shoot_x_max = 9.0;
    double shoot_step = 1e-3;
    double shoot_beta = infinite_beta;

    std::vector<double> sweep_betas;

    std::string output_dir = "out";

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Throws BumpError(ConfigError) with a message that starts with the
/// offending key, e.g. "firing.h: threshold must be positive".
ScenarioConfig parse_config(std::istream& is);
ScenarioConfig load_config(const std::string& path);
void write_config(std::ostream& os, const ScenarioConfig& config);

KernelModel kernel_from(const ScenarioConfig& config);
FiringRateModel firing_from(const ScenarioConfig& config, double beta);
inline FiringRateModel firing_from(const ScenarioConfig& config) { return firing_from(config, config.firing_beta); }

/// Shortest decimal text that reads back to the same double; "inf" for +∞.
std::string format_number(double x);
/// Accepts decimal floats and "inf"; throws ConfigError naming `key` otherwise.
double parse_number(const std::string& text, const std::string& key);

}  // namespace bumpforge::cli
