#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "hetnet/montecarlo.hpp"

namespace hetnet::io {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SweepSpec {
    enum class Variable { NbarAs, SigmaS, D, Beta, Ns0 };
    Variable variable = Variable::NbarAs;
    std::vector<double> values{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0};
    bool couple_sigma = true; // sigma_s sweeps drag sigma_u along
    bool engine_analytic = true;
    bool engine_sim = true;
    bool policy_p1 = true;
    bool policy_p2 = true;
};

const char* to_string(SweepSpec::Variable v);

struct RunConfig {
    NetworkParams params;
    SweepSpec sweep;
    SimConfig sim;
    CoverageOptions coverage;
    std::string out_dir = ".";
};

// Flat key=value text, one canonical schema (version 1).  Unknown keys and
// invariant violations are errors carrying the offending line/key.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);
std::string serialize_config(const RunConfig& config);

// applies one sweep value to a parameter set
NetworkParams apply_sweep_value(const NetworkParams& base,
                                SweepSpec::Variable variable, double value,
                                bool couple_sigma);

// deterministic per-point seed derivation
std::uint64_t point_seed(std::uint64_t master, std::uint64_t point_index);

struct SweepOutcome {
    std::filesystem::path csv_path;
    std::filesystem::path manifest_path;
    int failed_rows = 0;
};

// Runs the configured sweep, writing <out>/sweep.csv and <out>/manifest.json.
// Per-point failures are recorded in the status column and the run continues.
SweepOutcome run_sweep(const RunConfig& config, std::ostream* progress = nullptr);

// Re-runs a sweep from the config snapshot embedded in a manifest.
SweepOutcome run_sweep_from_manifest(const std::filesystem::path& manifest_path,
                                     const std::filesystem::path& out_dir,
                                     std::ostream* progress = nullptr);

// Emits a self-contained matplotlib script reproducing one of the paper-style
// figures from a sweep manifest.  Throws ConfigError when the manifest lacks
// the sweep the figure needs; nothing is written in that case.
std::filesystem::path emit_plot_script(const std::filesystem::path& manifest_path,
                                       const std::string& figure_id,
                                       const std::filesystem::path& out_dir);

// fixed 9-significant-digit CSV number format
std::string fmt9(double v);

} // namespace hetnet::io
