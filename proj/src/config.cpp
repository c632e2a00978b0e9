#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "hetnet/io.hpp"

namespace hetnet::io {

const char* to_string(SweepSpec::Variable v) {
    switch (v) {
    case SweepSpec::Variable::NbarAs: return "nbar_as";
    case SweepSpec::Variable::SigmaS: return "sigma_s";
    case SweepSpec::Variable::D: return "d";
    case SweepSpec::Variable::Beta: return "beta";
    case SweepSpec::Variable::Ns0: return "n_s0";
    }
    return "?";
}

namespace {

struct RawEntry {
    std::string value;
    int line = 0;
    bool used = false;
};

using RawMap = std::map<std::string, RawEntry>;

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& origin, const std::string& key,
                    const RawEntry& e) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing text");
        return v;
    } catch (const std::exception&) {
        fail(origin, e.line, "key '" + key + "': cannot parse '" + e.value +
                                 "' as a number");
    }
}

bool parse_bool(const std::string& origin, const std::string& key,
                const RawEntry& e) {
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    fail(origin, e.line, "key '" + key + "': expected true/false, got '" +
                             e.value + "'");
}

class Fields {
  public:
    Fields(RawMap& raw, std::string origin) : raw_(raw), origin_(std::move(origin)) {}

    bool has(const std::string& key) {
        auto it = raw_.find(key);
        if (it == raw_.end()) return false;
        return true;
    }
    double number(const std::string& key, double fallback) {
        auto it = raw_.find(key);
        if (it == raw_.end()) return fallback;
        it->second.used = true;
        return parse_double(origin_, key, it->second);
    }
    bool boolean(const std::string& key, bool fallback) {
        auto it = raw_.find(key);
        if (it == raw_.end()) return fallback;
        it->second.used = true;
        return parse_bool(origin_, key, it->second);
    }
    std::string text(const std::string& key, const std::string& fallback) {
        auto it = raw_.find(key);
        if (it == raw_.end()) return fallback;
        it->second.used = true;
        return it->second.value;
    }
    int line_of(const std::string& key) const {
        auto it = raw_.find(key);
        return it == raw_.end() ? 0 : it->second.line;
    }
    const std::string& origin() const { return origin_; }

  private:
    RawMap& raw_;
    std::string origin_;
};

double exclusive_power(Fields& f, const std::string& stem, double fallback_mw) {
    const std::string k_dbm = stem + "_dbm", k_mw = stem + "_mw";
    const bool has_dbm = f.has(k_dbm), has_mw = f.has(k_mw);
    if (has_dbm && has_mw)
        fail(f.origin(), f.line_of(k_mw),
             "keys '" + k_dbm + "' and '" + k_mw + "' are mutually exclusive");
    if (has_mw) return f.number(k_mw, 0.0);
    if (has_dbm) return dbm_to_mw(f.number(k_dbm, 0.0));
    return fallback_mw;
}

std::vector<double> parse_value_list(const std::string& origin, int line,
                                     const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            fail(origin, line, "sweep_values: cannot parse '" + item + "'");
        }
    }
    if (out.empty()) fail(origin, line, "sweep_values: empty list");
    return out;
}

} // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RawMap raw;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            fail(origin, lineno, "expected 'key = value', got '" + stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) fail(origin, lineno, "empty key");
        if (raw.count(key))
            fail(origin, lineno, "duplicate key '" + key + "'");
        raw[key] = RawEntry{value, lineno, false};
    }

    Fields f(raw, origin);
    const double version = f.number("schema_version", 1.0);
    if (version != 1.0)
        fail(origin, f.line_of("schema_version"),
             "unsupported schema_version " + std::to_string(version));

    RunConfig cfg;
    NetworkParams& p = cfg.params;
    p.lambda_m = f.number("lambda_m_per_km2", p.lambda_m);
    p.lambda_p = f.number("lambda_p_per_km2", p.lambda_p);
    p.n_s0 = static_cast<int>(f.number("n_s0", p.n_s0));
    p.nbar_as = f.number("nbar_as", p.nbar_as);
    p.sigma_s = f.number("sigma_s_km", p.sigma_s);
    p.sigma_u = f.number("sigma_u_km", p.sigma_u);
    p.P_m = exclusive_power(f, "P_m", p.P_m);
    p.P_s = exclusive_power(f, "P_s", p.P_s);
    if (f.has("beta_db") && f.has("beta_linear"))
        fail(origin, f.line_of("beta_linear"),
             "keys 'beta_db' and 'beta_linear' are mutually exclusive");
    if (f.has("beta_linear")) p.beta = f.number("beta_linear", p.beta);
    else p.beta = db_to_linear(f.number("beta_db", 0.0));
    p.alpha = f.number("alpha", p.alpha);

    const bool has_p0 = f.has("P_0_dbm") || f.has("P_0_mw");
    const bool has_d = f.has("D_km");
    if (has_p0 && has_d)
        fail(origin, f.line_of("D_km"),
             "keys 'P_0_*' and 'D_km' are mutually exclusive");
    if (has_d) {
        const double d = f.number("D_km", 0.0);
        if (!(d > 0.0)) fail(origin, f.line_of("D_km"), "D_km must be positive");
        if (!(p.alpha > 2.0))
            fail(origin, f.line_of("D_km"), "alpha must exceed 2");
        p.P_0 = p.P_s * std::pow(d, -p.alpha);
    } else {
        p.P_0 = exclusive_power(f, "P_0", p.P_0);
    }

    SweepSpec& sw = cfg.sweep;
    const std::string var = f.text("sweep_variable", "nbar_as");
    if (var == "nbar_as") sw.variable = SweepSpec::Variable::NbarAs;
    else if (var == "sigma_s") sw.variable = SweepSpec::Variable::SigmaS;
    else if (var == "d") sw.variable = SweepSpec::Variable::D;
    else if (var == "beta") sw.variable = SweepSpec::Variable::Beta;
    else if (var == "n_s0") sw.variable = SweepSpec::Variable::Ns0;
    else
        fail(origin, f.line_of("sweep_variable"),
             "sweep_variable must be one of nbar_as|sigma_s|d|beta|n_s0");

    const bool has_list = f.has("sweep_values");
    const bool has_grid =
        f.has("sweep_start") || f.has("sweep_stop") || f.has("sweep_count");
    if (has_list && has_grid)
        fail(origin, f.line_of("sweep_values"),
             "give either sweep_values or sweep_start/stop/count, not both");
    if (has_list) {
        sw.values = parse_value_list(origin, f.line_of("sweep_values"),
                                     f.text("sweep_values", ""));
    } else if (has_grid) {
        const double start = f.number("sweep_start", 1.0);
        const double stop = f.number("sweep_stop", start);
        const int count = static_cast<int>(f.number("sweep_count", 1.0));
        if (count < 1)
            fail(origin, f.line_of("sweep_count"), "sweep_count must be >= 1");
        sw.values.clear();
        for (int i = 0; i < count; ++i)
            sw.values.push_back(count == 1 ? start
                                           : start + (stop - start) * i /
                                                       (count - 1));
    }
    sw.couple_sigma = f.boolean("sweep_couple_sigma", sw.couple_sigma);

    const std::string engine = f.text("engine", "both");
    if (engine == "analytic") { sw.engine_analytic = true; sw.engine_sim = false; }
    else if (engine == "sim") { sw.engine_analytic = false; sw.engine_sim = true; }
    else if (engine == "both") { sw.engine_analytic = sw.engine_sim = true; }
    else fail(origin, f.line_of("engine"), "engine must be analytic|sim|both");

    const std::string policy = f.text("policy", "both");
    if (policy == "p1") { sw.policy_p1 = true; sw.policy_p2 = false; }
    else if (policy == "p2") { sw.policy_p1 = false; sw.policy_p2 = true; }
    else if (policy == "both") { sw.policy_p1 = sw.policy_p2 = true; }
    else fail(origin, f.line_of("policy"), "policy must be p1|p2|both");

    SimConfig& sim = cfg.sim;
    sim.trials = static_cast<std::uint64_t>(f.number("trials", sim.trials));
    sim.seed = static_cast<std::uint64_t>(f.number("seed", sim.seed));
    sim.window_radius = f.number("window_radius_km", sim.window_radius);
    sim.batch_size = static_cast<std::uint64_t>(
        f.number("batch_size", sim.batch_size));
    sim.threads = static_cast<int>(f.number("threads", sim.threads));

    CoverageOptions& cov = cfg.coverage;
    const std::string mode = f.text("laplace_mode", "simplified");
    if (mode == "simplified") cov.mode = IntraMode::SimplifiedExponential;
    else if (mode == "exact") cov.mode = IntraMode::ExactTruncatedSum;
    else
        fail(origin, f.line_of("laplace_mode"),
             "laplace_mode must be simplified|exact");
    cov.full_adaptive_outer =
        f.boolean("full_adaptive_outer", cov.full_adaptive_outer);
    cov.threads = sim.threads;

    cfg.out_dir = f.text("out_dir", cfg.out_dir);

    for (const auto& [key, entry] : raw)
        if (!entry.used)
            fail(origin, entry.line, "unknown key '" + key + "'");

    try {
        p.validate();
        sim.check();
    } catch (const std::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    if (sw.values.empty()) throw ConfigError(origin + ": empty sweep values");
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string());
}

namespace {

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string serialize_config(const RunConfig& cfg) {
    const NetworkParams& p = cfg.params;
    const SweepSpec& sw = cfg.sweep;
    std::ostringstream out;
    out << "schema_version = 1\n";
    out << "lambda_m_per_km2 = " << num17(p.lambda_m) << "\n";
    out << "lambda_p_per_km2 = " << num17(p.lambda_p) << "\n";
    out << "n_s0 = " << p.n_s0 << "\n";
    out << "nbar_as = " << num17(p.nbar_as) << "\n";
    out << "sigma_s_km = " << num17(p.sigma_s) << "\n";
    out << "sigma_u_km = " << num17(p.sigma_u) << "\n";
    // powers in mW so serialize -> load round-trips exactly
    out << "P_m_mw = " << num17(p.P_m) << "\n";
    out << "P_s_mw = " << num17(p.P_s) << "\n";
    out << "P_0_mw = " << num17(p.P_0) << "\n";
    out << "alpha = " << num17(p.alpha) << "\n";
    out << "beta_linear = " << num17(p.beta) << "\n";
    out << "sweep_variable = " << to_string(sw.variable) << "\n";
    out << "sweep_values = ";
    for (std::size_t i = 0; i < sw.values.size(); ++i)
        out << (i ? "," : "") << num17(sw.values[i]);
    out << "\n";
    out << "sweep_couple_sigma = " << (sw.couple_sigma ? "true" : "false") << "\n";
    out << "engine = "
        << (sw.engine_analytic && sw.engine_sim
                ? "both"
                : (sw.engine_analytic ? "analytic" : "sim"))
        << "\n";
    out << "policy = "
        << (sw.policy_p1 && sw.policy_p2 ? "both" : (sw.policy_p1 ? "p1" : "p2"))
        << "\n";
    out << "trials = " << cfg.sim.trials << "\n";
    out << "seed = " << cfg.sim.seed << "\n";
    out << "window_radius_km = " << num17(cfg.sim.window_radius) << "\n";
    out << "batch_size = " << cfg.sim.batch_size << "\n";
    out << "threads = " << cfg.sim.threads << "\n";
    out << "laplace_mode = "
        << (cfg.coverage.mode == IntraMode::ExactTruncatedSum ? "exact"
                                                              : "simplified")
        << "\n";
    out << "full_adaptive_outer = "
        << (cfg.coverage.full_adaptive_outer ? "true" : "false") << "\n";
    out << "out_dir = " << cfg.out_dir << "\n";
    return out.str();
}

NetworkParams apply_sweep_value(const NetworkParams& base,
                                SweepSpec::Variable variable, double value,
                                bool couple_sigma) {
    NetworkParams p = base;
    switch (variable) {
    case SweepSpec::Variable::NbarAs:
        p.nbar_as = value;
        break;
    case SweepSpec::Variable::SigmaS:
        p.sigma_s = value;
        if (couple_sigma) p.sigma_u = value;
        break;
    case SweepSpec::Variable::D:
        if (!(value > 0.0))
            throw ConfigError("sweep over d requires positive values");
        p.P_0 = p.P_s * std::pow(value, -p.alpha);
        break;
    case SweepSpec::Variable::Beta:
        p.beta = db_to_linear(value); // beta sweep values are in dB
        break;
    case SweepSpec::Variable::Ns0:
        p.n_s0 = static_cast<int>(std::lround(value));
        break;
    }
    p.validate();
    return p;
}

std::uint64_t point_seed(std::uint64_t master, std::uint64_t point_index) {
    std::uint64_t sm = master ^ (0x9E3779B97F4A7C15ULL * (point_index + 1));
    splitmix64(sm);
    return splitmix64(sm);
}

std::string fmt9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.8e", v);
    return buf;
}

} // namespace hetnet::io
