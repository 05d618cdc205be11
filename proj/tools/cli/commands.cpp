#include "commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <thread>

#include "bumpforge/fhn_ode.hpp"
#include "bumpforge/refinement.hpp"

namespace bumpforge::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

/// Failure with a fixed exit code, raised where the generic ErrorCode
/// mapping would pick the wrong one.
struct CommandFailure {
    int code;
    std::string message;
};

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError:
        case ErrorCode::InvalidParameter:
            return kConfigError;
        case ErrorCode::DataError:
            return kDataError;
        case ErrorCode::NotRegular:
        case ErrorCode::SingularJacobian:
        case ErrorCode::NotABump:
        case ErrorCode::SingularMatrix:
        case ErrorCode::NotApplicable:
            return kAssumptionFailure;
        case ErrorCode::NoConvergence:
        case ErrorCode::DivergenceDetected:
            return kNonConvergence;
        case ErrorCode::QuadratureFailure:
        case ErrorCode::OddCrossings:
            return kNumericFailure;
    }
    return kNumericFailure;
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Json number_or_inf(double x) { return std::isinf(x) ? Json("inf") : Json(x); }

fs::path output_dir(const ScenarioConfig& config, const CommandOptions& opts) {
    fs::path dir = opts.out_dir.empty() ? fs::path(config.output_dir) : fs::path(opts.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw CommandFailure{kDataError, "cannot create output directory '" + dir.string() + "': " + ec.message()};
    return dir;
}

std::ofstream open_artifact(const fs::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw CommandFailure{kDataError, "cannot write '" + path.string() + "'"};
    return os;
}

void write_json(const fs::path& path, const Json& j) {
    auto os = open_artifact(path);
    os << j.dump(2) << "\n";
}

/// Newton failure is a solver failure (exit 1) here, not non-convergence of
/// the refinement.
LimitBump solve_limit(const ScenarioConfig& config) {
    const KernelModel kernel = kernel_from(config);
    try {
        return solve_crossings(kernel, config.firing_h, static_cast<std::size_t>(config.bump_N), config.initial_guess);
    } catch (const BumpError& e) {
        if (e.code() == ErrorCode::NoConvergence) throw CommandFailure{kNumericFailure, e.what()};
        throw;
    }
}

Grid grid_for(const ScenarioConfig& config, const LimitBump& bump) {
    return default_grid(bump, config.grid_M, config.grid_delta);
}

RefinementConfig refinement_config(const ScenarioConfig& config, const LimitBump& bump) {
    return RefinementConfig{
        .grid = grid_for(config, bump),
        .max_iters = config.max_iters,
        .tol = config.tol,
        .exact_pn = config.exact_pn,
    };
}

FiringRateModel finite_firing(const ScenarioConfig& config, double beta, const char* what) {
    if (config.firing_family == "step" || std::isinf(beta)) {
        throw CommandFailure{kConfigError, std::string("firing.beta: ") + what + " needs a finite beta"};
    }
    if (config.firing_family == "logistic" && !config.allow_logistic) {
        throw CommandFailure{kAssumptionFailure,
                             "firing.family: the logistic rate is positive below threshold; set "
                             "firing.allow_logistic = true to use it anyway"};
    }
    return firing_from(config, beta);
}

void write_error_history(const fs::path& path, const std::vector<double>& history) {
    auto os = open_artifact(path);
    os << "n,error\n";
    for (std::size_t i = 0; i < history.size(); ++i) os << (i + 1) << "," << fmt17(history[i]) << "\n";
}

Json limit_json(const LimitBump& bump) {
    const LimitAssumptionReport report = verify_limit_assumptions(bump);
    Json assumptions{{"regular", report.regular}, {"invertible", report.invertible}};
    if (report.homoclinic_bound) {
        assumptions["homoclinic_bound"] = *report.homoclinic_bound;
        assumptions["homoclinic_ok"] = report.homoclinic_ok.value_or(false);
    }
    return Json{
        {"crossings", std::vector<double>(bump.crossings().values().begin(), bump.crossings().values().end())},
        {"margins", bump.margins()},
        {"jacobian_det", bump.jacobian_det()},
        {"residual_norm", bump.residual_norm()},
        {"newton_iterations", bump.newton_iterations()},
        {"assumptions", assumptions},
    };
}

template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const CommandFailure& f) {
        err << "bumpforge: " << f.message << "\n";
        return f.code;
    } catch (const RefinementFailure& e) {
        err << "bumpforge: " << to_string(e.code()) << ": " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const BumpError& e) {
        err << "bumpforge: " << to_string(e.code()) << ": " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "bumpforge: " << e.what() << "\n";
        return kNumericFailure;
    }
}

}  // namespace

std::vector<double> parse_beta_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) {
            fail(ErrorCode::ConfigError, "--betas: empty entry");
        }
        out.push_back(parse_number(item, "--betas"));
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!std::isfinite(out[i]) || !(out[i] > 0) || (i > 0 && !(out[i] > out[i - 1]))) {
            fail(ErrorCode::ConfigError, "--betas: must be finite, positive and strictly increasing");
        }
    }
    return out;
}

unsigned thread_budget() {
    if (const char* env = std::getenv("BUMPFORGE_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_solve_limit(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const fs::path dir = output_dir(config, opts);
        const LimitBump bump = solve_limit(config);
        const Json j = limit_json(bump);
        write_json(dir / "limit_bump.json", j);

        const GridFunction u = initial_state(bump, grid_for(config, bump)).U;
        auto os = open_artifact(dir / "u_infinity.csv");
        write_csv(os, u);

        out << j.dump(2) << "\n";
        if (!verify_limit_assumptions(bump).passed()) {
            err << "bumpforge: limit bump fails the regularity or homoclinic checks\n";
            return static_cast<int>(kAssumptionFailure);
        }
        return static_cast<int>(kSuccess);
    });
}

int cmd_refine(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const double beta = opts.beta.value_or(config.firing_beta);
        const FiringRateModel firing = finite_firing(config, beta, "refine");
        const fs::path dir = output_dir(config, opts);
        const LimitBump bump = solve_limit(config);
        const RefinementConfig rc = refinement_config(config, bump);

        try {
            const RefinementResult result = run_refinement(bump, firing, rc);
            write_error_history(dir / "error_history.csv", result.state.error_history);
            {
                auto os = open_artifact(dir / "u_beta.csv");
                write_csv(os, result.U);
            }
            const double d = rc.grid.half_width();
            const std::vector<double> crossings = find_threshold_crossings(
                [&result](double x) { return result.U.interpolate(x); }, config.firing_h, -d, d,
                CrossingSearchOptions{.include_tangencies = false});
            const Json summary{
                {"beta", beta},
                {"iterations", result.state.n},
                {"final_error", result.state.error_history.back()},
                {"residual", result.state.residual},
                {"crossings_of_U_beta", crossings},
            };
            write_json(dir / "summary.json", summary);
            out << summary.dump(2) << "\n";
            return static_cast<int>(kSuccess);
        } catch (const RefinementFailure& e) {
            write_error_history(dir / "error_history.csv", e.state().error_history);
            err << "bumpforge: " << to_string(e.code()) << ": " << e.what() << "\n";
            return exit_code_for(e.code());
        }
    });
}

int cmd_verify(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (opts.profile.empty()) throw CommandFailure{kConfigError, "--profile: a profile CSV is required"};
        std::ifstream in(opts.profile);
        if (!in) throw CommandFailure{kDataError, "cannot open profile '" + opts.profile + "'"};
        const GridFunction u = read_csv(in);

        const KernelModel kernel = kernel_from(config);
        const double beta = opts.beta.value_or(config.firing_beta);
        const FiringRateModel firing = firing_from(config, beta);
        const double h = config.firing_h;
        const double d = u.grid().half_width();

        const Sampler inside = [&u](double x) { return u.interpolate(x); };
        const std::vector<double> grid_crossings =
            find_threshold_crossings(inside, h, -d, d, CrossingSearchOptions{.include_tangencies = false});

        // Outside [−d, d] the profile is extended by one application of the
        // operator, as the refinement defines u_β.
        Sampler outside;
        std::optional<Reconstruction> recon;
        if (firing.is_step()) {
            if (grid_crossings.size() % 2 != 0) {
                const Json j{{"crossings", grid_crossings}, {"is_bump", false}, {"is_regular", false}};
                out << j.dump(2) << "\n";
                err << "bumpforge: odd number of threshold crossings on the profile grid\n";
                return static_cast<int>(kNumericFailure);
            }
            outside = [&](double x) {
                double du = 0.0;
                for (std::size_t i = 0; i < grid_crossings.size(); ++i) {
                    du += (i % 2 == 0 ? 1.0 : -1.0) * kernel.eval(x - grid_crossings[i]);
                }
                return Sample{step_operator(grid_crossings, kernel, x), du};
            };
        } else {
            recon.emplace(u, kernel, firing);
            outside = [&recon](double x) { return (*recon)(x); };
        }
        const Sampler sampler = [&](double x) { return u.grid().contains(x) ? u.interpolate(x) : outside(x); };

        const BumpClassification cls = classify_bump(sampler, h, d, d + 30.0);

        const double reach = d + 3.0;
        std::vector<double> test_grid(2001);
        for (std::size_t i = 0; i < test_grid.size(); ++i) {
            test_grid[i] = -reach + 2.0 * reach * static_cast<double>(i) / static_cast<double>(test_grid.size() - 1);
        }
        ResidualOptions ro;
        ro.search_halfwidth = reach;
        const double residual = residual_fixed_point(sampler, kernel, firing, test_grid, ro);

        const Json j{
            {"crossings", cls.crossings_found},
            {"is_bump", cls.is_bump},
            {"is_regular", cls.is_regular},
            {"gamma", cls.margin_gamma},
            {"A", cls.window_A},
            {"slopes", cls.slopes_at_crossings},
            {"beta", number_or_inf(beta)},
            {"residual", residual},
            {"residual_bound", config.residual_bound},
        };
        out << j.dump(2) << "\n";
        if (!cls.is_regular) {
            err << "bumpforge: profile is not a regular bump\n";
            return static_cast<int>(kNumericFailure);
        }
        if (!(residual <= config.residual_bound)) {
            err << "bumpforge: fixed-point residual " << residual << " exceeds verify.residual_bound\n";
            return static_cast<int>(kNumericFailure);
        }
        return static_cast<int>(kSuccess);
    });
}

int cmd_sweep_beta(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const std::vector<double> betas = opts.betas.value_or(config.sweep_betas);
        const FiringRateModel firing = finite_firing(config, config.firing_beta, "sweep-beta");
        const fs::path dir = output_dir(config, opts);
        const LimitBump bump = solve_limit(config);
        const std::vector<SweepRow> rows = sweep_beta(bump, firing, betas, refinement_config(config, bump), opts.threads);

        auto os = open_artifact(dir / "sweep.csv");
        os << "beta,c1_distance,iterations,status\n";
        Json table = Json::array();
        for (const SweepRow& row : rows) {
            os << fmt17(row.beta) << "," << (row.c1_distance ? fmt17(*row.c1_distance) : std::string()) << ","
               << row.iterations << "," << row.status << "\n";
            table.push_back(Json{{"beta", row.beta},
                                 {"c1_distance", row.c1_distance ? Json(*row.c1_distance) : Json(nullptr)},
                                 {"iterations", row.iterations},
                                 {"status", row.status}});
        }
        out << table.dump(2) << "\n";
        return static_cast<int>(kSuccess);
    });
}

int cmd_shoot(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (config.kernel_family != "exponential") {
            throw CommandFailure{kAssumptionFailure, "kernel.family: shooting needs the exponential kernel"};
        }
        const double beta = opts.beta.value_or(config.shoot_beta);
        const FiringRateModel firing =
            std::isinf(beta) ? firing_from(config, infinite_beta) : finite_firing(config, beta, "shoot");
        const double k = config.kernel_k;
        const fs::path dir = output_dir(config, opts);

        const Trajectory t = shoot_homoclinic(k, firing, config.shoot_x_max, config.shoot_step);
        {
            auto os = open_artifact(dir / "trajectory.csv");
            os << "x,u,v\n";
            for (std::size_t i = 0; i < t.x.size(); ++i) {
                os << fmt17(t.x[i]) << "," << fmt17(t.points[i].u) << "," << fmt17(t.points[i].v) << "\n";
            }
        }

        Json j{
            {"k", k},
            {"h", config.firing_h},
            {"beta", number_or_inf(beta)},
            {"x_max", config.shoot_x_max},
            {"step", config.shoot_step},
            {"samples", t.x.size()},
            {"blew_up", t.blew_up},
        };
        // The trajectory starts on the left crossing, so it should follow u_∞(x − a).
        if (config.bump_N == 1) {
            const LimitBump bump = solve_limit(config);
            const double a = bump.crossings()[0];
            j["sup_deviation"] = sup_deviation(t, [&bump, a](double x) { return bump.value(x - a); });
        }
        write_json(dir / "shoot.json", j);
        out << j.dump(2) << "\n";
        return static_cast<int>(kSuccess);
    });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"bumpforge: bump solutions of u = H_beta u"};
    app.require_subcommand(1);

    std::string config_path, out_dir, profile, betas_text, beta_text;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "scenario file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    };
    CLI::App* solve = app.add_subcommand("solve-limit", "solve for the beta = inf crossings");
    CLI::App* refine = app.add_subcommand("refine", "run the correction scheme at finite beta");
    CLI::App* verify = app.add_subcommand("verify", "classify a profile CSV and compute its residual");
    CLI::App* sweep = app.add_subcommand("sweep-beta", "refine over a list of beta values");
    CLI::App* shoot = app.add_subcommand("shoot", "RK4 shooting along the homoclinic orbit");
    for (CLI::App* sub : {solve, refine, verify, sweep, shoot}) add_common(sub);
    verify->add_option("--profile", profile, "profile CSV (x,u,uprime)")->required();
    for (CLI::App* sub : {refine, verify, shoot}) sub->add_option("--beta", beta_text, "override beta (number or inf)");
    CLI::Option* betas_opt = sweep->add_option("--betas", betas_text, "comma separated beta list");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : static_cast<int>(kConfigError);
    }

    CommandOptions opts;
    ScenarioConfig config;
    try {
        config = load_config(config_path);
        opts.out_dir = out_dir;
        opts.profile = profile;
        if (!beta_text.empty()) opts.beta = parse_number(beta_text, "--beta");
        if (opts.beta && !(*opts.beta > 0)) fail(ErrorCode::ConfigError, "--beta: must be positive or inf");
        if (betas_opt->count() > 0) opts.betas = parse_beta_list(betas_text);
        opts.threads = thread_budget();
    } catch (const BumpError& e) {
        err << "bumpforge: config error: " << e.what() << "\n";
        return static_cast<int>(kConfigError);
    }

    if (solve->parsed()) return cmd_solve_limit(config, opts, out, err);
    if (refine->parsed()) return cmd_refine(config, opts, out, err);
    if (verify->parsed()) return cmd_verify(config, opts, out, err);
    if (sweep->parsed()) return cmd_sweep_beta(config, opts, out, err);
    return cmd_shoot(config, opts, out, err);
}

}  // namespace bumpforge::cli
