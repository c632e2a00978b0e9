#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "hetnet/io.hpp"
#include "hetnet/version.hpp"

namespace {

using namespace hetnet;

struct CommonArgs {
    std::string config_path;
    std::string engine, policy;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
    bool have_seed = false, have_trials = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_config) {
    auto* c = cmd->add_option("--config", args.config_path,
                              "path to a key=value config file")
                  ->envname("HETNET_CONFIG");
    if (needs_config) c->required();
    cmd->add_option("--engine", args.engine, "analytic|sim|both")
        ->envname("HETNET_ENGINE")
        ->check(CLI::IsMember({"analytic", "sim", "both"}));
    cmd->add_option("--policy", args.policy, "p1|p2|both")
        ->envname("HETNET_POLICY")
        ->check(CLI::IsMember({"p1", "p2", "both"}));
    cmd->add_option("--seed", args.seed, "master RNG seed")
        ->envname("HETNET_SEED")
        ->each([&](const std::string&) { args.have_seed = true; });
    cmd->add_option("--trials", args.trials, "Monte Carlo trials per point")
        ->envname("HETNET_TRIALS")
        ->each([&](const std::string&) { args.have_trials = true; });
    cmd->add_option("--out", args.out_dir, "output directory")
        ->envname("HETNET_OUT");
}

io::RunConfig load_with_overrides(const CommonArgs& args) {
    io::RunConfig cfg = args.config_path.empty()
                            ? io::RunConfig{}
                            : io::load_config(args.config_path);
    if (!args.engine.empty()) {
        cfg.sweep.engine_analytic = args.engine != "sim";
        cfg.sweep.engine_sim = args.engine != "analytic";
    }
    if (!args.policy.empty()) {
        cfg.sweep.policy_p1 = args.policy != "p2";
        cfg.sweep.policy_p2 = args.policy != "p1";
    }
    if (args.have_seed) cfg.sim.seed = args.seed;
    if (args.have_trials) cfg.sim.trials = args.trials;
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    cfg.params.validate();
    return cfg;
}

void print_report(const CoverageReport& r) {
    std::printf("  policy %s, %s", to_string(r.policy),
                r.provenance == Provenance::Analytic ? "analytic" : "sim");
    if (r.provenance == Provenance::Analytic)
        std::printf(" (%s mode)\n", to_string(r.mode));
    else
        std::printf(" (%llu trials, 95%% half-width %.4f)\n",
                    static_cast<unsigned long long>(r.trials), r.half_width_95);
    std::printf("    coverage   macro %.6f  small %.6f  total %.6f\n",
                r.per_tier_coverage.macro, r.per_tier_coverage.small,
                r.total_coverage);
    std::printf("    assoc      macro %.6f  small %.6f\n", r.assoc_prob_avg.macro,
                r.assoc_prob_avg.small);
    std::printf("    throughput %.6f bits/s/Hz/km^2\n", r.throughput);
}

int cmd_coverage(const CommonArgs& args) {
    const io::RunConfig cfg = load_with_overrides(args);
    const ClusterKernel kernel = ClusterKernel::gaussian(cfg.params.sigma_s);
    std::printf("coverage at lambda_m=%g lambda_p=%g n_s0=%d nbar_as=%g "
                "sigma_s=%g sigma_u=%g alpha=%g beta=%g D=%g km\n",
                cfg.params.lambda_m, cfg.params.lambda_p, cfg.params.n_s0,
                cfg.params.nbar_as, cfg.params.sigma_s, cfg.params.sigma_u,
                cfg.params.alpha, cfg.params.beta, cfg.params.D_km);
    for (const Policy policy : {Policy::P1, Policy::P2}) {
        if (policy == Policy::P1 && !cfg.sweep.policy_p1) continue;
        if (policy == Policy::P2 && !cfg.sweep.policy_p2) continue;
        if (cfg.sweep.engine_analytic) {
            const CoverageEngine engine(cfg.params, kernel, cfg.coverage);
            print_report(engine.coverage(policy));
        }
        if (cfg.sweep.engine_sim)
            print_report(simulate_coverage(cfg.params, kernel, policy, cfg.sim));
    }
    return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& from_manifest) {
    io::SweepOutcome out;
    if (!from_manifest.empty()) {
        out = io::run_sweep_from_manifest(
            from_manifest, args.out_dir.empty() ? "." : args.out_dir,
            &std::cerr);
    } else {
        out = io::run_sweep(load_with_overrides(args), &std::cerr);
    }
    std::printf("wrote %s and %s (%d failed rows)\n", out.csv_path.c_str(),
                out.manifest_path.c_str(), out.failed_rows);
    return out.failed_rows == 0 ? 0 : 1;
}

int cmd_validate(const CommonArgs& args, double tolerance) {
    const io::RunConfig cfg = load_with_overrides(args);
    const ClusterKernel kernel = ClusterKernel::gaussian(cfg.params.sigma_s);
    const CoverageEngine engine(cfg.params, kernel, cfg.coverage);
    int failures = 0;
    for (const Policy policy : {Policy::P1, Policy::P2}) {
        if (policy == Policy::P1 && !cfg.sweep.policy_p1) continue;
        if (policy == Policy::P2 && !cfg.sweep.policy_p2) continue;
        const CoverageReport an = engine.coverage(policy);
        const CoverageReport si =
            simulate_coverage(cfg.params, kernel, policy, cfg.sim);
        const double diff = std::abs(an.total_coverage - si.total_coverage);
        const bool ok = diff <= tolerance;
        failures += !ok;
        std::printf("[%s] policy %s: analytic %.5f vs sim %.5f (+-%.5f), "
                    "|diff| %.5f <= %.3f\n",
                    ok ? "PASS" : "FAIL", to_string(policy), an.total_coverage,
                    si.total_coverage, si.half_width_95, diff, tolerance);
    }
    return failures == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-tier clustered HetNet coverage/throughput calculator"};
    app.set_version_flag("--version", hetnet::kVersion);
    app.require_subcommand(1);

    CommonArgs cov_args, sweep_args, val_args;
    std::string from_manifest;
    double tolerance = 0.01;
    std::string plot_manifest, figure_id, plot_out = ".";

    auto* cov = app.add_subcommand("coverage",
                                   "single-point coverage and throughput");
    add_common(cov, cov_args, false);

    auto* sw = app.add_subcommand("sweep", "run a parameter sweep to CSV");
    add_common(sw, sweep_args, false);
    sw->add_option("--from-manifest", from_manifest,
                   "re-run the sweep embedded in a manifest");

    auto* val = app.add_subcommand(
        "validate", "dual-engine agreement check at the configured point");
    add_common(val, val_args, false);
    val->add_option("--tolerance", tolerance,
                    "max |analytic - sim| total coverage gap");

    auto* plot = app.add_subcommand("plot", "emit a figure-reproduction script");
    plot->add_option("--manifest", plot_manifest, "sweep manifest path")
        ->required();
    plot->add_option("--figure", figure_id, "fig2..fig9")->required();
    plot->add_option("--out", plot_out, "output directory")
        ->envname("HETNET_OUT");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cov->parsed()) return cmd_coverage(cov_args);
        if (sw->parsed()) return cmd_sweep(sweep_args, from_manifest);
        if (val->parsed()) return cmd_validate(val_args, tolerance);
        if (plot->parsed()) {
            const auto path =
                hetnet::io::emit_plot_script(plot_manifest, figure_id, plot_out);
            std::printf("wrote %s\n", path.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
