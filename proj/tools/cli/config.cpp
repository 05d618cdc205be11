#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <variant>

#include "bumpforge/errors.hpp"

namespace bumpforge::cli {

namespace {

using List = std::vector<double>;
using Value = std::variant<double, bool, std::string, List>;

struct Entry {
    Value value;
    int line;
};

[[noreturn]] void config_error(const std::string& key, const std::string& msg) {
    fail(ErrorCode::ConfigError, key + ": " + msg);
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

Value parse_value(const std::string& text, const std::string& key) {
    if (text.empty()) config_error(key, "missing value");
    if (text == "true") return true;
    if (text == "false") return false;
    if (text.front() == '"') {
        if (text.size() < 2 || text.back() != '"') config_error(key, "unterminated string");
        return text.substr(1, text.size() - 2);
    }
    if (text.front() == '[') {
        if (text.back() != ']') config_error(key, "unterminated list");
        List out;
        const std::string inner = trim(std::string_view(text).substr(1, text.size() - 2));
        if (inner.empty()) return out;
        std::stringstream ss(inner);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(parse_number(item, key));
        if (inner.back() == ',') config_error(key, "trailing comma in list");
        return out;
    }
    return parse_number(text, key);
}

class Document {
public:
    explicit Document(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    double number(const std::string& key) {
        const Value& v = take(key);
        if (const double* d = std::get_if<double>(&v)) return *d;
        if (const std::string* t = std::get_if<std::string>(&v); t && *t == "inf") return infinite_beta;
        config_error(key, "expected a number");
    }
    std::optional<double> number_opt(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return number(key);
    }
    int integer(const std::string& key) {
        const double d = number(key);
        if (!std::isfinite(d) || d != std::floor(d) || std::abs(d) > 1e9) config_error(key, "expected an integer");
        return static_cast<int>(d);
    }
    bool boolean(const std::string& key) {
        const Value& v = take(key);
        if (const bool* b = std::get_if<bool>(&v)) return *b;
        config_error(key, "expected true or false");
    }
    std::string string(const std::string& key) {
        const Value& v = take(key);
        if (const std::string* s = std::get_if<std::string>(&v)) return *s;
        config_error(key, "expected a quoted string");
    }
    List list(const std::string& key) {
        const Value& v = take(key);
        if (const List* l = std::get_if<List>(&v)) return *l;
        if (const double* d = std::get_if<double>(&v)) return {*d};
        config_error(key, "expected a list of numbers");
    }

    void reject_unused() const {
        for (const auto& [key, entry] : entries_) {
            if (!used_.count(key)) config_error(key, "unknown key (line " + std::to_string(entry.line) + ")");
        }
    }

private:
    const Value& take(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) config_error(key, "required key is missing");
        used_.insert(key);
        return it->second.value;
    }

    std::map<std::string, Entry> entries_;
    std::set<std::string> used_;
};

Document tokenize(std::istream& is) {
    std::map<std::string, Entry> entries;
    std::string section;
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": bad section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string name = trim(std::string_view(line).substr(0, eq));
        const std::string key = section.empty() ? name : section + "." + name;
        if (entries.count(key)) config_error(key, "duplicate key (line " + std::to_string(line_no) + ")");
        entries.emplace(key, Entry{parse_value(trim(std::string_view(line).substr(eq + 1)), key), line_no});
    }
    return Document(std::move(entries));
}

void require(bool ok, const std::string& key, const std::string& msg) {
    if (!ok) config_error(key, msg);
}

}  // namespace

std::string format_number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    std::string s(buf, r.ptr);
    if (s.find_first_of(".en") == std::string::npos) s += ".0";
    return s;
}

double parse_number(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    if (t == "inf" || t == "+inf") return infinite_beta;
    double value = 0.0;
    const char* first = t.data() + (t.size() > 1 && t[0] == '+' ? 1 : 0);
    const auto r = std::from_chars(first, t.data() + t.size(), value);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size() || std::isnan(value)) {
        config_error(key, "cannot parse '" + t + "' as a number");
    }
    return value;
}

ScenarioConfig parse_config(std::istream& is) {
    Document doc = tokenize(is);
    ScenarioConfig c;

    c.kernel_family = doc.string("kernel.family");
    c.kernel_k = doc.number("kernel.k");
    c.kernel_K = doc.number_opt("kernel.K");
    c.kernel_M = doc.number_opt("kernel.M");
    c.kernel_m = doc.number_opt("kernel.m");

    if (doc.has("firing.family")) c.firing_family = doc.string("firing.family");
    if (doc.has("firing.beta")) c.firing_beta = doc.number("firing.beta");
    c.firing_h = doc.number("firing.h");
    if (doc.has("firing.p")) c.firing_p = doc.number("firing.p");
    if (doc.has("firing.allow_logistic")) c.allow_logistic = doc.boolean("firing.allow_logistic");

    c.bump_N = doc.integer("bump.N");
    c.initial_guess = doc.list("bump.initial_guess");

    if (doc.has("grid.M")) c.grid_M = doc.integer("grid.M");
    if (doc.has("grid.delta")) c.grid_delta = doc.number("grid.delta");

    if (doc.has("refine.max_iters")) c.max_iters = doc.integer("refine.max_iters");
    if (doc.has("refine.tol")) c.tol = doc.number("refine.tol");
    if (doc.has("refine.exact_pn")) c.exact_pn = doc.boolean("refine.exact_pn");

    if (doc.has("verify.residual_bound")) c.residual_bound = doc.number("verify.residual_bound");

    if (doc.has("shoot.x_max")) c.shoot_x_max = doc.number("shoot.x_max");
    if (doc.has("shoot.step")) c.shoot_step = doc.number("shoot.step");
    if (doc.has("shoot.beta")) c.shoot_beta = doc.number("shoot.beta");

    if (doc.has("sweep.betas")) c.sweep_betas = doc.list("sweep.betas");

    if (doc.has("output.dir")) c.output_dir = doc.string("output.dir");

    doc.reject_unused();

    // Validation, reported against the key that carries the bad value.
    require(c.kernel_family == "exponential" || c.kernel_family == "wizard_hat" || c.kernel_family == "diff_gaussians",
            "kernel.family", "expected \"exponential\", \"wizard_hat\" or \"diff_gaussians\"");
    require(std::isfinite(c.kernel_k) && c.kernel_k > 0, "kernel.k", "must be positive and finite");
    if (c.kernel_family == "diff_gaussians") {
        require(c.kernel_K.has_value(), "kernel.K", "required for diff_gaussians");
        require(c.kernel_M.has_value(), "kernel.M", "required for diff_gaussians");
        require(c.kernel_m.has_value(), "kernel.m", "required for diff_gaussians");
        require(std::isfinite(*c.kernel_K) && *c.kernel_K > 0, "kernel.K", "must be positive and finite");
        require(std::isfinite(*c.kernel_M) && *c.kernel_M > 0, "kernel.M", "must be positive and finite");
        require(std::isfinite(*c.kernel_m) && *c.kernel_m > 0, "kernel.m", "must be positive and finite");
        require(*c.kernel_K > *c.kernel_M, "kernel.K", "must exceed kernel.M");
        require(c.kernel_k > *c.kernel_m, "kernel.k", "must exceed kernel.m");
    } else {
        require(!c.kernel_K && !c.kernel_M && !c.kernel_m, "kernel.K", "only diff_gaussians takes K, M, m");
    }

    require(c.firing_family == "hill" || c.firing_family == "logistic" || c.firing_family == "step", "firing.family",
            "expected \"hill\", \"logistic\" or \"step\"");
    require(c.firing_beta > 0, "firing.beta", "must be positive or inf");
    require(std::isfinite(c.firing_h) && c.firing_h > 0, "firing.h", "threshold must be positive");
    require(std::isfinite(c.firing_p), "firing.p", "must be finite");
    require(c.firing_family != "hill" || c.firing_p > 1, "firing.p", "hill exponent must exceed 1");

    require(c.bump_N >= 1, "bump.N", "must be at least 1");
    require(c.initial_guess.size() == static_cast<std::size_t>(c.bump_N), "bump.initial_guess",
            "needs exactly bump.N entries");
    for (std::size_t i = 0; i < c.initial_guess.size(); ++i) {
        const double a = c.initial_guess[i];
        require(std::isfinite(a) && a > 0 && (i == 0 || a > c.initial_guess[i - 1]), "bump.initial_guess",
                "entries must be positive and strictly increasing");
    }

    require(c.grid_M >= 65 && c.grid_M % 2 == 1, "grid.M", "must be odd and at least 65");
    require(std::isfinite(c.grid_delta) && c.grid_delta > 0, "grid.delta", "must be positive");

    require(c.max_iters >= 1, "refine.max_iters", "must be at least 1");
    require(std::isfinite(c.tol) && c.tol > 0, "refine.tol", "must be positive");
    require(std::isfinite(c.residual_bound) && c.residual_bound > 0, "verify.residual_bound", "must be positive");

    require(std::isfinite(c.shoot_x_max) && c.shoot_x_max != 0, "shoot.x_max", "must be finite and nonzero");
    require(std::isfinite(c.shoot_step) && c.shoot_step > 0, "shoot.step", "must be positive");
    require(c.shoot_beta > 0, "shoot.beta", "must be positive or inf");

    for (std::size_t i = 0; i < c.sweep_betas.size(); ++i) {
        const double b = c.sweep_betas[i];
        require(std::isfinite(b) && b > 0 && (i == 0 || b > c.sweep_betas[i - 1]), "sweep.betas",
                "must be finite, positive and strictly increasing");
    }
    require(!c.output_dir.empty(), "output.dir", "must not be empty");

    // Parameter combinations the library rejects.
    try {
        (void)kernel_from(c);
    } catch (const BumpError& e) {
        config_error("kernel", e.what());
    }
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ConfigError, "cannot open config file '" + path + "'");
    return parse_config(in);
}

void write_config(std::ostream& os, const ScenarioConfig& c) {
    auto list = [](const std::vector<double>& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
        return s + "]";
    };
    auto flag = [](bool b) { return b ? "true" : "false"; };

    os << "[kernel]\n";
    os << "family = \"" << c.kernel_family << "\"\n";
    os << "k = " << format_number(c.kernel_k) << "\n";
    if (c.kernel_K) os << "K = " << format_number(*c.kernel_K) << "\n";
    if (c.kernel_M) os << "M = " << format_number(*c.kernel_M) << "\n";
    if (c.kernel_m) os << "m = " << format_number(*c.kernel_m) << "\n";
    os << "\n[firing]\n";
    os << "family = \"" << c.firing_family << "\"\n";
    os << "beta = " << format_number(c.firing_beta) << "\n";
    os << "h = " << format_number(c.firing_h) << "\n";
    os << "p = " << format_number(c.firing_p) << "\n";
    os << "allow_logistic = " << flag(c.allow_logistic) << "\n";
    os << "\n[bump]\n";
    os << "N = " << c.bump_N << "\n";
    os << "initial_guess = " << list(c.initial_guess) << "\n";
    os << "\n[grid]\n";
    os << "M = " << c.grid_M << "\n";
    os << "delta = " << format_number(c.grid_delta) << "\n";
    os << "\n[refine]\n";
    os << "max_iters = " << c.max_iters << "\n";
    os << "tol = " << format_number(c.tol) << "\n";
    os << "exact_pn = " << flag(c.exact_pn) << "\n";
    os << "\n[verify]\n";
    os << "residual_bound = " << format_number(c.residual_bound) << "\n";
    os << "\n[shoot]\n";
    os << "x_max = " << format_number(c.shoot_x_max) << "\n";
    os << "step = " << format_number(c.shoot_step) << "\n";
    os << "beta = " << format_number(c.shoot_beta) << "\n";
    os << "\n[sweep]\n";
    os << "betas = " << list(c.sweep_betas) << "\n";
    os << "\n[output]\n";
    os << "dir = \"" << c.output_dir << "\"\n";
}

KernelModel kernel_from(const ScenarioConfig& c) {
    if (c.kernel_family == "exponential") return make_kernel(Exponential{c.kernel_k});
    if (c.kernel_family == "wizard_hat") return make_kernel(WizardHat{c.kernel_k});
    if (c.kernel_family == "diff_gaussians") {
        return make_kernel(DiffGaussians{c.kernel_K.value_or(0), c.kernel_k, c.kernel_M.value_or(0), c.kernel_m.value_or(0)});
    }
    config_error("kernel.family", "unknown family '" + c.kernel_family + "'");
}

FiringRateModel firing_from(const ScenarioConfig& c, double beta) {
    FiringFamily family = FiringFamily::Hill;
    if (c.firing_family == "logistic") family = FiringFamily::Logistic;
    if (c.firing_family == "step") family = FiringFamily::Step;
    try {
        return make_firing_rate(family, beta, c.firing_h, c.firing_p);
    } catch (const BumpError& e) {
        config_error("firing", e.what());
    }
}

}  // namespace bumpforge::cli
