// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "bumpforge/numerics.hpp"
#include "bumpforge/refinement.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "fixtures.hpp"

using namespace bumpforge;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

const std::string kScenarios = BUMPFORGE_SCENARIO_DIR;
const fs::path kTmp = fs::path(BUMPFORGE_TEST_TMP) / "acceptance";

std::string scenario(const std::string& name) { return kScenarios + "/" + name + ".toml"; }

struct Run {
    int code;
    std::string out;
    std::string err;
    double seconds;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "bumpforge");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const auto t0 = std::chrono::steady_clock::now();
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {code, out.str(), err.str(), dt};
}

fs::path fresh(const std::string& name) {
    const fs::path p = kTmp / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

std::vector<double> read_error_history(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    std::vector<double> e;
    while (std::getline(in, line)) e.push_back(std::stod(line.substr(line.find(',') + 1)));
    return e;
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

Outcome ac1() {
    const fs::path dir = fresh("ac1");
    const Run r = cli({"solve-limit", "--config", scenario("fhn"), "--out", dir.string()});
    if (r.code != 0) return {false, "exit " + std::to_string(r.code) + ": " + r.err};
    const Json j = Json::parse(slurp(dir / "limit_bump.json"));
    const double a = j["crossings"][0].get<double>();
    const double m = j["margins"][0].get<double>();
    const double da = std::abs(a - fixtures::fhn_half_width());
    const double dm = std::abs(m - fixtures::kFhnK * fixtures::kFhnH);
    const bool ok = da <= 1e-6 && dm <= 1e-5 && r.seconds < 1.0;
    return {ok, "a=" + fmt("%.8f", a) + " |a-a*|=" + fmt("%.1e", da) + " margin=" + fmt("%.6f", m) +
                    " |m-kh|=" + fmt("%.1e", dm) + " t=" + fmt("%.3f", r.seconds) + "s"};
}

Outcome ac2() {
    const std::vector<std::pair<std::string, std::array<double, 2>>> cases{{"neural2bump_a", {0.2948, 0.8506}},
                                                                           {"neural2bump_b", {0.3786, 0.6782}}};
    bool ok = true;
    std::string detail;
    for (const auto& [name, expected] : cases) {
        const fs::path dir = fresh("ac2_" + name);
        const Run r = cli({"solve-limit", "--config", scenario(name), "--out", dir.string()});
        if (r.code != 0) return {false, name + " exit " + std::to_string(r.code) + ": " + r.err};
        const Json j = Json::parse(slurp(dir / "limit_bump.json"));
        const double a1 = j["crossings"][0].get<double>(), a2 = j["crossings"][1].get<double>();
        const bool regular = j["assumptions"]["regular"].get<bool>() && j["assumptions"]["invertible"].get<bool>();
        const bool hit = std::abs(a1 - expected[0]) <= 1e-3 && std::abs(a2 - expected[1]) <= 1e-3;
        ok = ok && hit && regular && r.seconds < 1.0;
        detail += name + ": (" + fmt("%.4f", a1) + ", " + fmt("%.4f", a2) + ") det J=" +
                  fmt("%.4f", j["jacobian_det"].get<double>()) + (regular ? " regular" : " NOT regular") +
                  " t=" + fmt("%.3f", r.seconds) + "s; ";
    }
    return {ok, detail};
}

struct RefineRun {
    bool ok = false;
    int iterations = 0;
    bool monotone = false;
    std::string note;
};

RefineRun refine(const std::string& name) {
    const fs::path dir = kTmp / ("refine_" + name);
    fs::remove_all(dir);
    const Run r = cli({"refine", "--config", scenario(name), "--out", dir.string()});
    RefineRun out;
    const std::vector<double> e = read_error_history(dir / "error_history.csv");
    out.iterations = static_cast<int>(e.size());
    out.monotone = true;
    for (std::size_t i = 2; i < e.size(); ++i) {
        if (!(e[i] < e[i - 1])) out.monotone = false;
    }
    out.ok = r.code == 0;
    out.note = name + ": " + (out.ok ? "converged" : "exit " + std::to_string(r.code)) + " after " +
               std::to_string(out.iterations) + " iterations, " +
               (out.monotone ? "monotone" : "not monotone") + " from iteration 2";
    return out;
}

Outcome ac3() {
    const RefineRun fhn = refine("fhn");
    const RefineRun a = refine("neural2bump_a");
    const RefineRun b = refine("neural2bump_b");
    const bool ok = fhn.ok && fhn.iterations <= 15 && fhn.monotone && a.ok && a.iterations <= 10 && a.monotone &&
                    b.ok && b.iterations <= 10 && b.monotone;
    return {ok, fhn.note + " (budget 15); " + a.note + " (budget 10); " + b.note + " (budget 10)"};
}

Outcome ac4() {
    bool ok = true;
    std::string detail;
    for (const char* name : {"fhn", "neural2bump_a", "neural2bump_b"}) {
        const fs::path dir = fresh(std::string("ac4_") + name);
        if (cli({"solve-limit", "--config", scenario(name), "--out", dir.string()}).code != 0) {
            return {false, std::string(name) + ": solve-limit failed"};
        }
        const Run v = cli({"verify", "--config", scenario(name), "--profile", (dir / "u_infinity.csv").string(),
                           "--beta", "inf"});
        const double res = Json::parse(v.out)["residual"].get<double>();
        ok = ok && res <= 1e-8;
        detail += std::string(name) + " u_inf@inf=" + fmt("%.1e", res) + "; ";
    }
    // Converged u_β of the FHN scenario, extended by T₂ and tested out to |x| = d + 3.
    const fs::path dir = kTmp / "refine_fhn";
    if (!fs::exists(dir / "u_beta.csv")) {
        const Run r = cli({"refine", "--config", scenario("fhn"), "--out", dir.string()});
        if (r.code != 0) return {false, detail + "fhn refine failed: " + r.err};
    }
    const Run v = cli({"verify", "--config", scenario("fhn"), "--profile", (dir / "u_beta.csv").string()});
    const double res = Json::parse(v.out)["residual"].get<double>();
    ok = ok && res <= 1e-7;
    detail += "fhn u_beta@100=" + fmt("%.1e", res);
    return {ok, detail};
}

Outcome ac5() {
    const fs::path dir = fresh("ac5");
    const Run r = cli({"sweep-beta", "--config", scenario("fhn"), "--out", dir.string(), "--betas", "25,50,100,200,400"});
    if (r.code != 0) return {false, "exit " + std::to_string(r.code) + ": " + r.err};
    const Json rows = Json::parse(r.out);
    bool ok = rows.size() == 5 && r.seconds < 30.0;
    std::string detail;
    double prev = INFINITY;
    for (const auto& row : rows) {
        const double beta = row["beta"].get<double>();
        if (row["c1_distance"].is_null()) {
            ok = false;
            detail += "beta=" + fmt("%g", beta) + ": " + row["status"].get<std::string>() + " after " +
                      std::to_string(row["iterations"].get<int>()) + " it; ";
            prev = INFINITY;
            continue;
        }
        const double d = row["c1_distance"].get<double>();
        if (!(d < prev)) ok = false;
        prev = d;
        detail += "beta=" + fmt("%g", beta) + ": " + fmt("%.4e", d) + "; ";
    }
    return {ok, detail + "t=" + fmt("%.1f", r.seconds) + "s"};
}

Outcome ac6() {
    std::string detail;
    bool ok = true;

    // Boundedness on random inputs.
    {
        std::mt19937_64 rng(77);
        std::uniform_real_distribution<double> val(-1.0, 3.0), slope(-10.0, 10.0);
        const std::vector<KernelModel> ks{fixtures::fhn_kernel(), fixtures::two_gauss_kernel(), fixtures::wizard_kernel()};
        double worst = -INFINITY;
        for (int t = 0; t < 100; ++t) {
            const Grid g(0.5 + 0.03 * t, 129);
            std::vector<double> v(129), d(129);
            for (int j = 0; j < 129; ++j) {
                v[j] = val(rng);
                d[j] = slope(rng);
            }
            const KernelModel& w = ks[t % 3];
            QuadratureOptions q;
            q.verify = false;
            const GridFunction hu = apply_H_beta(GridFunction(g, v, d, false), w, fixtures::hill(40 + t, 0.2), q);
            worst = std::max(worst, numerics::sup_norm(hu.values()) - w.l1_norm());
        }
        ok = ok && worst <= 0;
        detail += "max(|Hu|-|w|_L1)=" + fmt("%.3f", worst) + "; ";
    }
    // Symmetry preservation.
    {
        double worst = 0;
        for (const LimitBump& b : {fixtures::fhn_bump(), fixtures::two_bump_a(), fixtures::two_bump_b()}) {
            const GridFunction u = initial_state(b, default_grid(b)).U;
            worst = std::max(worst, apply_H_beta(u, b.kernel(), fixtures::hill(100, b.h())).symmetry_defect());
        }
        ok = ok && worst <= 1e-10;
        detail += "symmetry=" + fmt("%.1e", worst) + "; ";
    }
    // Antiderivative against adaptive Gauss–Kronrod.
    {
        double worst = 0;
        for (const KernelModel& w : {fixtures::fhn_kernel(), fixtures::two_gauss_kernel(), fixtures::wizard_kernel()}) {
            for (double x = -10; x <= 10; x += 0.25) {
                const double q = x >= 0 ? fixtures::integrate_split([&](double y) { return w(y); }, 0, x, {1.0})
                                        : -fixtures::integrate_split([&](double y) { return w(y); }, x, 0, {-1.0});
                worst = std::max(worst, std::abs(q - w.antideriv(x)));
            }
        }
        ok = ok && worst <= 1e-8;
        detail += "W oracle=" + fmt("%.1e", worst) + "; ";
    }
    // Jacobian against central differences at the solved roots.
    {
        double worst = 0;
        for (const LimitBump& b : {fixtures::fhn_bump(), fixtures::two_bump_a(), fixtures::two_bump_b()}) {
            const auto a = b.crossings().values();
            const Eigen::MatrixXd J = jacobian_J(a, b.kernel(), b.h());
            for (std::size_t j = 0; j < a.size(); ++j) {
                std::vector<double> p(a.begin(), a.end()), m(a.begin(), a.end());
                const double eps = 1e-6;
                p[j] += eps;
                m[j] -= eps;
                const Eigen::VectorXd col = (residual_G(p, b.kernel(), b.h()) - residual_G(m, b.kernel(), b.h())) / (2 * eps);
                for (std::size_t i = 0; i < a.size(); ++i) {
                    const long ii = static_cast<long>(i), jj = static_cast<long>(j);
                    worst = std::max(worst, std::abs(J(ii, jj) - col(ii)) / std::max(1.0, std::abs(col(ii))));
                }
            }
        }
        ok = ok && worst <= 1e-5;
        detail += "Jacobian FD=" + fmt("%.1e", worst) + "; ";
    }
    // Directional derivative of H_β.
    {
        const LimitBump b = fixtures::fhn_bump();
        const FiringRateModel f = fixtures::hill(100, 0.2);
        const GridFunction u = initial_state(b, default_grid(b)).U;
        const GridFunction v = GridFunction::sample(
            u.grid(), [](double x) { return Sample{std::exp(-x * x), -2 * x * std::exp(-x * x)}; }, true);
        const double t = 1e-6;
        std::vector<double> pv(u.size()), pd(u.size());
        for (std::size_t j = 0; j < u.size(); ++j) {
            pv[j] = u.values()[j] + t * v.values()[j];
            pd[j] = u.derivs()[j] + t * v.derivs()[j];
        }
        const GridFunction h0 = apply_H_beta(u, b.kernel(), f);
        const GridFunction h1 = apply_H_beta(GridFunction(u.grid(), pv, pd, true), b.kernel(), f);
        const GridFunction s = apply_S_beta(u, v, b.kernel(), f);
        double worst = 0;
        for (std::size_t j = 0; j < u.size(); ++j)
            worst = std::max(worst, std::abs((h1.values()[j] - h0.values()[j]) / t - s.values()[j]));
        ok = ok && worst <= 1e-4;
        detail += "S_beta FD=" + fmt("%.1e", worst);
    }
    return {ok, detail};
}

Outcome ac7() {
    cli::ScenarioConfig base = cli::load_config(scenario("fhn"));
    std::vector<double> devs;
    std::string detail;
    for (double x_max : {3.0, 6.0, 9.0}) {
        const fs::path dir = fresh("ac7_" + fmt("%g", x_max));
        cli::ScenarioConfig c = base;
        c.shoot_x_max = x_max;
        {
            std::ofstream os(dir / "scenario.toml");
            cli::write_config(os, c);
        }
        const Run r = cli({"shoot", "--config", (dir / "scenario.toml").string(), "--out", dir.string()});
        if (r.code != 0) return {false, "shoot failed: " + r.err};
        const Json j = Json::parse(slurp(dir / "shoot.json"));
        devs.push_back(j["blew_up"].get<bool>() ? INFINITY : j["sup_deviation"].get<double>());
        detail += "x_max=" + fmt("%g", x_max) + ": " + fmt("%.3e", devs.back()) + "; ";
    }
    return {devs[0] <= devs[1] && devs[1] <= devs[2], detail};
}

Outcome ac8() {
    std::string detail;
    bool ok = true;
    for (const char* name : {"fhn", "neural2bump_a", "neural2bump_b"}) {
        std::vector<fs::path> dirs;
        for (const char* rep : {"1", "2"}) {
            const fs::path dir = fresh(std::string("ac8_") + name + "_" + rep);
            dirs.push_back(dir);
            for (const char* cmd : {"solve-limit", "refine", "sweep-beta"}) {
                cli({cmd, "--config", scenario(name), "--out", dir.string()});
            }
            if (std::string(name) == "fhn") cli({"shoot", "--config", scenario(name), "--out", dir.string()});
        }
        int files = 0;
        for (const auto& entry : fs::directory_iterator(dirs[0])) {
            const fs::path other = dirs[1] / entry.path().filename();
            ++files;
            if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
                ok = false;
                detail += std::string(name) + "/" + entry.path().filename().string() + " differs; ";
            }
        }
        detail += std::string(name) + ": " + std::to_string(files) + " artifacts compared; ";
    }
    return {ok, detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AC1 FHN 1-bump crossing and margin", ac1},
        {"AC2 two-Gaussian 2-bump crossings and regularity", ac2},
        {"AC3 refinement iteration budget and monotone error", ac3},
        {"AC4 fixed-point residual certificates", ac4},
        {"AC5 C1 distance decreasing along beta sweep", ac5},
        {"AC6 operator property suite", ac6},
        {"AC7 shooting deviation non-decreasing in x_max", ac7},
        {"AC8 byte-identical repeated runs", ac8},
    };
    fs::create_directories(kTmp);
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << " | " << o.detail << std::endl;
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
