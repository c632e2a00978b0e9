#include <chrono>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "hetnet/io.hpp"
#include "hetnet/version.hpp"

namespace hetnet::io {

namespace {

struct Row {
    std::string engine, policy, tier, status = "ok";
    double value = 0.0;
    double coverage = 0.0, ci = 0.0, assoc = 0.0, throughput = 0.0;
};

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

void append_rows(std::vector<Row>& rows, const std::string& engine,
                 const CoverageReport& rep, double value) {
    const char* policy = hetnet::to_string(rep.policy);
    rows.push_back({engine, policy, "macro", "ok", value,
                    rep.per_tier_coverage.macro, rep.coverage_half_width.macro,
                    rep.assoc_prob_avg.macro, rep.throughput_share.macro});
    rows.push_back({engine, policy, "small", "ok", value,
                    rep.per_tier_coverage.small, rep.coverage_half_width.small,
                    rep.assoc_prob_avg.small, rep.throughput_share.small});
    rows.push_back({engine, policy, "total", "ok", value, rep.total_coverage,
                    rep.half_width_95, 1.0, rep.throughput});
}

void append_failure(std::vector<Row>& rows, const std::string& engine,
                    const std::string& policy, double value,
                    const std::string& what) {
    for (const char* tier : {"macro", "small", "total"})
        rows.push_back({engine, policy, tier, "error: " + sanitize(what), value,
                        0.0, 0.0, 0.0, 0.0});
}

} // namespace

SweepOutcome run_sweep(const RunConfig& config, std::ostream* progress) {
    const auto t0 = std::chrono::steady_clock::now();
    const SweepSpec& sw = config.sweep;

    std::vector<Row> rows;
    int failures = 0;
    for (std::size_t i = 0; i < sw.values.size(); ++i) {
        const double value = sw.values[i];
        NetworkParams p;
        try {
            p = apply_sweep_value(config.params, sw.variable, value,
                                  sw.couple_sigma);
        } catch (const std::exception& e) {
            for (const bool analytic : {true, false}) {
                if (analytic && !sw.engine_analytic) continue;
                if (!analytic && !sw.engine_sim) continue;
                if (sw.policy_p1)
                    append_failure(rows, analytic ? "analytic" : "sim", "p1",
                                   value, e.what());
                if (sw.policy_p2)
                    append_failure(rows, analytic ? "analytic" : "sim", "p2",
                                   value, e.what());
                failures += (sw.policy_p1 ? 3 : 0) + (sw.policy_p2 ? 3 : 0);
            }
            continue;
        }
        const ClusterKernel kernel = ClusterKernel::gaussian(p.sigma_s);

        if (sw.engine_analytic) {
            try {
                const CoverageEngine engine(p, kernel, config.coverage);
                if (sw.policy_p1)
                    append_rows(rows, "analytic", engine.coverage(Policy::P1),
                                value);
                if (sw.policy_p2)
                    append_rows(rows, "analytic", engine.coverage(Policy::P2),
                                value);
            } catch (const std::exception& e) {
                if (sw.policy_p1)
                    append_failure(rows, "analytic", "p1", value, e.what());
                if (sw.policy_p2)
                    append_failure(rows, "analytic", "p2", value, e.what());
                failures += (sw.policy_p1 ? 3 : 0) + (sw.policy_p2 ? 3 : 0);
            }
        }
        if (sw.engine_sim) {
            SimConfig sim = config.sim;
            sim.seed = point_seed(config.sim.seed, i);
            for (const Policy policy : {Policy::P1, Policy::P2}) {
                if (policy == Policy::P1 && !sw.policy_p1) continue;
                if (policy == Policy::P2 && !sw.policy_p2) continue;
                try {
                    append_rows(rows, "sim",
                                simulate_coverage(p, kernel, policy, sim), value);
                } catch (const std::exception& e) {
                    append_failure(rows, "sim", hetnet::to_string(policy), value,
                                   e.what());
                    failures += 3;
                }
            }
        }
        if (progress)
            *progress << "point " << (i + 1) << "/" << sw.values.size() << " ("
                      << to_string(sw.variable) << " = " << value << ") done\n";
    }

    std::filesystem::create_directories(config.out_dir);
    SweepOutcome out;
    out.csv_path = std::filesystem::path(config.out_dir) / "sweep.csv";
    out.manifest_path = std::filesystem::path(config.out_dir) / "manifest.json";
    out.failed_rows = failures;

    {
        std::ofstream csv(out.csv_path, std::ios::binary);
        if (!csv) throw ConfigError("cannot write " + out.csv_path.string());
        csv << "sweep_var,value,engine,policy,tier,coverage,ci_half_width,"
               "assoc_prob,throughput,status\n";
        for (const Row& r : rows)
            csv << to_string(sw.variable) << ',' << fmt9(r.value) << ','
                << r.engine << ',' << r.policy << ',' << r.tier << ','
                << fmt9(r.coverage) << ',' << fmt9(r.ci) << ',' << fmt9(r.assoc)
                << ',' << fmt9(r.throughput) << ',' << r.status << '\n';
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    nlohmann::json manifest;
    manifest["schema_version"] = 1;
    manifest["library_version"] = kVersion;
    manifest["seed"] = config.sim.seed;
    manifest["wall_clock_seconds"] = wall;
    manifest["config"] = serialize_config(config);
    manifest["csv"] = out.csv_path.filename().string();
    manifest["sweep_variable"] = to_string(sw.variable);
    nlohmann::json points = nlohmann::json::array();
    for (const Row& r : rows) {
        points.push_back({{"value", r.value},
                          {"engine", r.engine},
                          {"policy", r.policy},
                          {"tier", r.tier},
                          {"coverage", r.coverage},
                          {"ci_half_width", r.ci},
                          {"assoc_prob", r.assoc},
                          {"throughput", r.throughput},
                          {"status", r.status}});
    }
    manifest["points"] = std::move(points);
    {
        std::ofstream mf(out.manifest_path, std::ios::binary);
        if (!mf) throw ConfigError("cannot write " + out.manifest_path.string());
        mf << manifest.dump(2) << "\n";
    }
    return out;
}

SweepOutcome run_sweep_from_manifest(const std::filesystem::path& manifest_path,
                                     const std::filesystem::path& out_dir,
                                     std::ostream* progress) {
    std::ifstream in(manifest_path);
    if (!in) throw ConfigError("cannot open manifest " + manifest_path.string());
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const std::exception& e) {
        throw ConfigError("manifest parse error: " + std::string(e.what()));
    }
    if (!manifest.contains("config"))
        throw ConfigError("manifest lacks the embedded config snapshot");
    RunConfig cfg = parse_config_text(manifest["config"].get<std::string>(),
                                      manifest_path.string() + ":config");
    cfg.out_dir = out_dir.string();
    return run_sweep(cfg, progress);
}

} // namespace hetnet::io
