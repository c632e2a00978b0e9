#pragma once

#include "hetnet/coverage.hpp"
#include "hetnet/rng.hpp"

namespace hetnet {

struct SimConfig {
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    double window_radius = 3.0; // km
    std::uint64_t batch_size = 4096;
    int threads = 0; // 0 = hardware concurrency

    void check() const {
        if (trials < 1) throw std::invalid_argument("SimConfig: trials >= 1");
        if (!(window_radius > 0.0))
            throw std::invalid_argument("SimConfig: window_radius > 0");
        if (batch_size < 1)
            throw std::invalid_argument("SimConfig: batch_size >= 1");
    }
};

// One sampled network.  The typical user sits at the origin; the
// representative cluster center at distance v0 on the positive x-axis gets
// exactly n_s0 SBS offsets, the remaining clusters carry their active SBSs
// directly.  Offsets are never window-clipped; only macro/parent point
// generation is windowed.  Fading is drawn lazily by the SIR evaluation.
struct NetworkRealization {
    std::vector<Vec2> macro_points;
    std::vector<Vec2> parent_points; // non-representative cluster centers
    Vec2 representative_center;
    double v0 = 0.0;
    std::vector<Vec2> representative_sbs_offsets; // exactly n_s0 entries
    int representative_active_count = 0;
    std::vector<int> representative_active; // indices into the offsets
    std::vector<std::vector<Vec2>> other_cluster_active_offsets;

    Tier serving_tier = Tier::Macro;
    int serving_sbs_index = -1; // small-served only
    double serving_distance = 0.0;
    double nearest_macro = 0.0;
    double nearest_sbs = 0.0;
};

// Active-SBS count in the representative cluster: truncated Poisson on
// [0, n_max], or its size-biased variant on [1, n_max] when the serving BS
// is one of the cluster's SBSs.
int sample_truncated_poisson(double nbar, int n_max, bool conditioned_on_serving,
                             Rng& rng);

NetworkRealization sample_realization(const NetworkParams& params,
                                      const ClusterKernel& kernel,
                                      Policy policy, const SimConfig& sim,
                                      Rng& rng);

// Applies the association policy literally per trial and estimates per-tier
// and total coverage, association frequencies, and throughput.  Identical
// (seed, params, policy, config) reproduce the report bit-for-bit regardless
// of the thread count.
CoverageReport simulate_coverage(const NetworkParams& params,
                                 const ClusterKernel& kernel, Policy policy,
                                 const SimConfig& sim);

} // namespace hetnet
