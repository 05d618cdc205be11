#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "bumpforge/errors.hpp"
#include "bumpforge/grid.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "fixtures.hpp"

using namespace bumpforge;
using namespace bumpforge::cli;
namespace fs = std::filesystem;

namespace {

const std::string kScenarios = BUMPFORGE_SCENARIO_DIR;

std::string scenario(const std::string& name) { return kScenarios + "/" + name + ".toml"; }

fs::path scratch(const std::string& name) {
    const fs::path p = fs::path(BUMPFORGE_TEST_TMP) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "bumpforge");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path write_variant(const std::string& base, const std::string& from, const std::string& to, const fs::path& dir) {
    std::string text = slurp(scenario(base));
    const auto pos = text.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    text.replace(pos, from.size(), to);
    const fs::path p = dir / (base + "_variant.toml");
    std::ofstream(p) << text;
    return p;
}

ScenarioConfig parse_text(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is);
}

std::string config_error_message(const std::string& text) {
    try {
        parse_text(text);
    } catch (const BumpError& e) {
        EXPECT_EQ(e.code(), ErrorCode::ConfigError);
        return e.what();
    }
    ADD_FAILURE() << "expected a config error";
    return {};
}

const char* kMinimal = R"(
[kernel]
family = "exponential"
k = 1.339
[firing]
h = 0.2
[bump]
N = 1
initial_guess = [0.4]
)";

}  // namespace

TEST(Config, BundledScenariosRoundTrip) {
    for (const char* name : {"fhn", "neural2bump_a", "neural2bump_b"}) {
        const ScenarioConfig c = load_config(scenario(name));
        std::ostringstream os;
        write_config(os, c);
        const ScenarioConfig again = parse_text(os.str());
        EXPECT_TRUE(c == again) << name;
        std::ostringstream os2;
        write_config(os2, again);
        EXPECT_EQ(os.str(), os2.str()) << name;
    }
}

TEST(Config, FhnScenarioValues) {
    const ScenarioConfig c = load_config(scenario("fhn"));
    EXPECT_EQ(c.kernel_family, "exponential");
    EXPECT_EQ(c.kernel_k, 1.339);
    EXPECT_EQ(c.firing_beta, 100.0);
    EXPECT_EQ(c.firing_h, 0.2);
    EXPECT_EQ(c.firing_p, 2.0);
    EXPECT_TRUE(std::isinf(c.shoot_beta));
    EXPECT_EQ(c.grid_M, 1025);
    EXPECT_EQ(c.grid_delta, 0.5);
}

TEST(Config, DefaultsFromMinimalFile) {
    const ScenarioConfig c = parse_text(kMinimal);
    EXPECT_EQ(c.firing_family, "hill");
    EXPECT_EQ(c.firing_beta, 100.0);
    EXPECT_EQ(c.max_iters, 50);
    EXPECT_EQ(c.tol, 1e-10);
    EXPECT_FALSE(c.exact_pn);
}

TEST(Config, ErrorsNameTheKey) {
    const std::string base = kMinimal;
    auto with = [&](const std::string& from, const std::string& to) {
        std::string t = base;
        t.replace(t.find(from), from.size(), to);
        return t;
    };
    EXPECT_EQ(config_error_message(with("h = 0.2", "h = -0.1")).rfind("firing.h", 0), 0u);
    EXPECT_EQ(config_error_message(with("k = 1.339", "k = abc")).rfind("kernel.k", 0), 0u);
    EXPECT_EQ(config_error_message(with("[0.4]", "[0.4, 0.2]")).rfind("bump.initial_guess", 0), 0u);
    EXPECT_EQ(config_error_message(base + "\n[grid]\nM = 1024\n").rfind("grid.M", 0), 0u);
    EXPECT_EQ(config_error_message(base + "\n[grid]\nwidth = 3\n").rfind("grid.width", 0), 0u);
    EXPECT_EQ(config_error_message(with("h = 0.2", "")).rfind("firing.h", 0), 0u);
    EXPECT_EQ(config_error_message(with("\"exponential\"", "\"gauss\"")).rfind("kernel.family", 0), 0u);
    const std::string dg = with("family = \"exponential\"\nk = 1.339", "family = \"diff_gaussians\"\nk = 2\nK = 1\nM = 3\nm = 0.5");
    EXPECT_EQ(config_error_message(dg).rfind("kernel.K", 0), 0u);
}

TEST(Config, InfinityAcceptedForBeta) {
    const ScenarioConfig a = parse_text(std::string(kMinimal) + "\n[shoot]\nbeta = inf\n");
    const ScenarioConfig b = parse_text(std::string(kMinimal) + "\n[shoot]\nbeta = \"inf\"\n");
    EXPECT_TRUE(std::isinf(a.shoot_beta));
    EXPECT_TRUE(a == b);
}

TEST(Config, BetaListParsing) {
    EXPECT_TRUE(parse_beta_list("").empty());
    EXPECT_EQ(parse_beta_list("25,50,100"), (std::vector<double>{25, 50, 100}));
    EXPECT_THROW(parse_beta_list("50,25"), BumpError);
    EXPECT_THROW(parse_beta_list("25,,50"), BumpError);
    EXPECT_THROW(parse_beta_list("25,inf"), BumpError);
}

TEST(Cli, SolveLimitFhn) {
    const fs::path dir = scratch("solve_fhn");
    const CliRun r = run_cli({"solve-limit", "--config", scenario("fhn"), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(dir / "limit_bump.json"));
    EXPECT_NEAR(j["crossings"][0].get<double>(), fixtures::fhn_half_width(), 1e-9);
    EXPECT_NE(slurp(dir / "limit_bump.json").find("0.4715"), std::string::npos);
    EXPECT_TRUE(j.contains("margins"));
    EXPECT_TRUE(j.contains("jacobian_det"));
    EXPECT_TRUE(j.contains("residual_norm"));
    EXPECT_EQ(slurp(dir / "u_infinity.csv").rfind("x,u,uprime\n", 0), 0u);
}

TEST(Cli, SolveLimitTwoBump) {
    const fs::path dir = scratch("solve_2a");
    const CliRun r = run_cli({"solve-limit", "--config", scenario("neural2bump_a"), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(dir / "limit_bump.json"));
    EXPECT_NEAR(j["crossings"][0].get<double>(), 0.2948, 1e-3);
    EXPECT_NEAR(j["crossings"][1].get<double>(), 0.8506, 1e-3);
}

TEST(Cli, NegativeThresholdIsConfigError) {
    const fs::path dir = scratch("neg_h");
    const fs::path cfg = write_variant("fhn", "h = 0.2", "h = -0.1", dir);
    const CliRun r = run_cli({"solve-limit", "--config", cfg.string(), "--out", dir.string()});
    EXPECT_EQ(r.code, 64);
    EXPECT_NE(r.err.find("firing.h"), std::string::npos) << r.err;
}

TEST(Cli, UsageErrorsAreConfigErrors) {
    EXPECT_EQ(run_cli({"solve-limit"}).code, 64);
    EXPECT_EQ(run_cli({"frobnicate", "--config", scenario("fhn")}).code, 64);
    EXPECT_EQ(run_cli({"solve-limit", "--config", "/nonexistent.toml"}).code, 64);
}

TEST(Cli, RefineTwoBumpWritesArtifacts) {
    const fs::path dir = scratch("refine_2a");
    const CliRun r = run_cli({"refine", "--config", scenario("neural2bump_a"), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto s = nlohmann::json::parse(slurp(dir / "summary.json"));
    for (const char* key : {"beta", "iterations", "final_error", "residual", "crossings_of_U_beta"})
        EXPECT_TRUE(s.contains(key)) << key;
    EXPECT_LE(s["iterations"].get<int>(), 10);
    EXPECT_EQ(s["crossings_of_U_beta"].size(), 4u);
    const std::string hist = slurp(dir / "error_history.csv");
    EXPECT_EQ(hist.rfind("n,error\n", 0), 0u);
    EXPECT_EQ(static_cast<int>(std::count(hist.begin(), hist.end(), '\n')), s["iterations"].get<int>() + 1);

    const CliRun v = run_cli({"verify", "--config", scenario("neural2bump_a"), "--profile", (dir / "u_beta.csv").string()});
    EXPECT_EQ(v.code, 0) << v.out << v.err;
}

TEST(Cli, ShallowBetaExitsWithDivergence) {
    const fs::path dir = scratch("shallow");
    const CliRun r = run_cli({"refine", "--config", scenario("fhn"), "--out", dir.string(), "--beta", "0.5"});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("DivergenceDetected"), std::string::npos) << r.err;
    EXPECT_TRUE(fs::exists(dir / "error_history.csv"));
}

TEST(Cli, RefineNeedsFiniteBeta) {
    const fs::path dir = scratch("refine_inf");
    EXPECT_EQ(run_cli({"refine", "--config", scenario("fhn"), "--out", dir.string(), "--beta", "inf"}).code, 64);
}

TEST(Cli, VerifyLimitProfileAtInfiniteBeta) {
    const fs::path dir = scratch("verify_inf");
    ASSERT_EQ(run_cli({"solve-limit", "--config", scenario("fhn"), "--out", dir.string()}).code, 0);
    const CliRun v = run_cli({"verify", "--config", scenario("fhn"), "--profile", (dir / "u_infinity.csv").string(),
                           "--beta", "inf"});
    EXPECT_EQ(v.code, 0) << v.err;
    const auto j = nlohmann::json::parse(v.out);
    EXPECT_LE(j["residual"].get<double>(), 1e-8);
    EXPECT_TRUE(j["is_regular"].get<bool>());
    for (const char* key : {"crossings", "is_bump", "is_regular", "gamma", "A", "slopes"}) EXPECT_TRUE(j.contains(key));
}

TEST(Cli, VerifyZeroProfileIsNotABump) {
    const fs::path dir = scratch("verify_zero");
    const Grid g(1.0, 129);
    {
        std::ofstream os(dir / "zero.csv");
        write_csv(os, GridFunction::zeros(g));
    }
    const CliRun v = run_cli({"verify", "--config", scenario("fhn"), "--profile", (dir / "zero.csv").string()});
    EXPECT_EQ(v.code, 1);
    EXPECT_FALSE(nlohmann::json::parse(v.out)["is_bump"].get<bool>());
}

TEST(Cli, VerifyMalformedProfileIsDataError) {
    const fs::path dir = scratch("verify_bad");
    std::ofstream(dir / "bad.csv") << "x,u,uprime\n0,1\n";
    EXPECT_EQ(run_cli({"verify", "--config", scenario("fhn"), "--profile", (dir / "bad.csv").string()}).code, 65);
    EXPECT_EQ(run_cli({"verify", "--config", scenario("fhn"), "--profile", (dir / "missing.csv").string()}).code, 65);
}

TEST(Cli, SweepEmptyListWritesHeaderOnly) {
    const fs::path dir = scratch("sweep_empty");
    const CliRun r = run_cli({"sweep-beta", "--config", scenario("neural2bump_a"), "--out", dir.string(), "--betas", ""});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(dir / "sweep.csv"), "beta,c1_distance,iterations,status\n");
}

TEST(Cli, SweepTwoBumpDistanceDecreases) {
    const fs::path dir = scratch("sweep_2a");
    const CliRun r =
        run_cli({"sweep-beta", "--config", scenario("neural2bump_a"), "--out", dir.string(), "--betas", "100,200,400"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = nlohmann::json::parse(r.out);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_GT(rows[0]["c1_distance"].get<double>(), rows[1]["c1_distance"].get<double>());
    EXPECT_GT(rows[1]["c1_distance"].get<double>(), rows[2]["c1_distance"].get<double>());
}

TEST(Cli, ShootRecordsInstabilityAtNine) {
    const fs::path dir = scratch("shoot");
    const CliRun r = run_cli({"shoot", "--config", scenario("fhn"), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(dir / "trajectory.csv").rfind("x,u,v\n", 0), 0u);
    const auto j = nlohmann::json::parse(slurp(dir / "shoot.json"));
    EXPECT_EQ(j["x_max"].get<double>(), 9.0);
    EXPECT_TRUE(j["blew_up"].get<bool>() || j["sup_deviation"].get<double>() > 0.1) << j.dump();
}

TEST(Cli, ShootNeedsExponentialKernel) {
    const fs::path dir = scratch("shoot_dg");
    EXPECT_EQ(run_cli({"shoot", "--config", scenario("neural2bump_a"), "--out", dir.string()}).code, 2);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    for (const fs::path& dir : {a, b}) {
        ASSERT_EQ(run_cli({"solve-limit", "--config", scenario("neural2bump_b"), "--out", dir.string()}).code, 0);
        ASSERT_EQ(run_cli({"refine", "--config", scenario("neural2bump_b"), "--out", dir.string()}).code, 0);
        ASSERT_EQ(run_cli({"sweep-beta", "--config", scenario("neural2bump_b"), "--out", dir.string(), "--betas",
                           "200,400"})
                      .code,
                  0);
    }
    for (const char* f : {"limit_bump.json", "u_infinity.csv", "u_beta.csv", "error_history.csv", "summary.json",
                          "sweep.csv"}) {
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
        EXPECT_FALSE(slurp(a / f).empty()) << f;
    }
}
