#pragma once

#include <cstdint>

#include "hetnet/laplace.hpp"

namespace hetnet {

struct TierValue {
    double macro = 0.0, small = 0.0;
    double get(Tier t) const { return t == Tier::Macro ? macro : small; }
    double& get(Tier t) { return t == Tier::Macro ? macro : small; }
};

enum class Provenance { Analytic, Simulated };

struct CoverageReport {
    Policy policy = Policy::P1;
    TierValue per_tier_coverage;
    double total_coverage = 0.0;
    TierValue assoc_prob_avg;     // averaged over the user-center distance
    TierValue throughput_share;   // per-tier contribution, bits/s/Hz/km^2
    double throughput = 0.0;

    Provenance provenance = Provenance::Analytic;
    IntraMode mode = IntraMode::SimplifiedExponential; // analytic runs
    std::uint64_t trials = 0;                          // simulated runs
    double half_width_95 = 0.0;        // Wilson 95% half-width, total coverage
    TierValue coverage_half_width;     // per-tier Wilson half-widths
    bool window_warning = false;       // simulated: far-field ring check fired
};

struct CoverageOptions {
    IntraMode mode = IntraMode::SimplifiedExponential;
    // replaces the fixed 64-node outer rule with adaptive quadrature over the
    // user-center distance; slower, used for verification
    bool full_adaptive_outer = false;
    int outer_nodes = 64;
    int inter_table_nodes = 256;
    double inner_rel_tol = 1e-7;
    int threads = 0; // 0 = hardware concurrency
};

// Shares the inter-cluster Laplace table and the outer quadrature rule
// between the two tiers (and both policies) at fixed parameters.
class CoverageEngine {
  public:
    CoverageEngine(const NetworkParams& params, const ClusterKernel& sbs_kernel,
                   const ClusterKernel& user_kernel, CoverageOptions options = {});
    // user kernel defaults to a Gaussian with sigma_u (Gaussian sbs kernel)
    // or the sbs kernel itself (custom)
    CoverageEngine(const NetworkParams& params, const ClusterKernel& sbs_kernel,
                   CoverageOptions options = {});

    CoverageReport coverage(Policy policy) const;

    // Policy 2 with an overridden distance threshold; reuses the cached table
    CoverageReport coverage_with_threshold(double d_km) const;

    // cached inter-cluster Laplace transform: monotone-cubic interpolation on
    // a log-s grid, power-law tail below it, direct evaluation above it
    double inter_laplace(double s) const;

    const NetworkParams& params() const { return params_; }

  private:
    void build();
    CoverageReport coverage_impl(const NetworkParams& p, Policy policy) const;
    double tier_coverage(const NetworkParams& p, Policy policy, Tier tier) const;
    double serving_integral(const NetworkParams& p, Policy policy, Tier tier,
                            double nu0) const;
    double outer_average(const std::function<double(double)>& f) const;

    NetworkParams params_;
    ClusterKernel sbs_, user_;
    CoverageOptions opt_;
    double nu0_max_ = 0.0;
    double x_max_macro_ = 0.0;
    std::vector<std::pair<double, double>> outer_rule_; // (nu0, weight*f_V0)
    numerics::PchipInterpolant inter_table_;            // ln s -> ln L
};

CoverageReport coverage_policy1(const NetworkParams& params,
                                const ClusterKernel& kernel,
                                const CoverageOptions& options = {});
CoverageReport coverage_policy2(const NetworkParams& params,
                                const ClusterKernel& kernel,
                                const CoverageOptions& options = {});

// area throughput per the active-transmitter density convention
double throughput(const NetworkParams& params, double coverage_macro,
                  double coverage_small, Policy policy);

// argmax of Policy-2 total coverage over d_grid, refined by one
// golden-section pass between the best point's grid neighbours; ties break
// toward smaller D
std::pair<double, double> optimal_threshold(const NetworkParams& params,
                                            const ClusterKernel& kernel,
                                            const std::vector<double>& d_grid,
                                            const CoverageOptions& options = {});

// Policy-2 parameter helper: distance threshold -> power threshold
NetworkParams with_distance_threshold(const NetworkParams& params, double d_km);

} // namespace hetnet
