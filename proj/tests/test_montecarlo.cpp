#include <doctest.h>

#include <cmath>

#include "hetnet/montecarlo.hpp"
#include "support/params.hpp"
#include "support/statcheck.hpp"

using namespace hetnet;
using testsupport::baseline;

TEST_SUITE("montecarlo") {

TEST_CASE("truncated poisson sampler matches the exact weights") {
    Rng rng(1001);
    SUBCASE("plain truncation") {
        const auto probs = truncated_poisson_weights(3.0, 10, false);
        std::vector<long long> counts(11, 0);
        for (int i = 0; i < 1000000; ++i)
            ++counts[sample_truncated_poisson(3.0, 10, false, rng)];
        CHECK(statcheck::chi2_gof_pvalue(counts, probs) > 0.01);
    }
    SUBCASE("size-biased truncation, support 1..n") {
        const auto probs = truncated_poisson_weights(3.0, 10, true);
        std::vector<long long> counts(10, 0);
        for (int i = 0; i < 1000000; ++i) {
            const int v = sample_truncated_poisson(3.0, 10, true, rng);
            CHECK(v >= 1);
            CHECK(v <= 10);
            ++counts[v - 1];
        }
        CHECK(statcheck::chi2_gof_pvalue(counts, probs) > 0.01);
    }
    SUBCASE("vanishing mean degenerates to the support floor") {
        int zeros = 0, ones = 0;
        for (int i = 0; i < 1000; ++i) {
            zeros += sample_truncated_poisson(1e-12, 10, false, rng) == 0;
            ones += sample_truncated_poisson(1e-12, 10, true, rng) == 1;
        }
        CHECK(zeros == 1000);
        CHECK(ones == 1000);
    }
}

TEST_CASE("sampled realizations have the advertised structure") {
    const NetworkParams p = baseline();
    const ClusterKernel k = ClusterKernel::gaussian(p.sigma_s);
    SimConfig sim;
    sim.window_radius = 3.0;
    Rng rng(2024);

    double macro_count = 0.0;
    std::vector<double> v0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        const NetworkRealization nr =
            sample_realization(p, k, Policy::P1, sim, rng);
        macro_count += static_cast<double>(nr.macro_points.size());
        v0.push_back(nr.v0);

        REQUIRE(static_cast<int>(nr.representative_sbs_offsets.size()) == p.n_s0);
        REQUIRE(static_cast<int>(nr.representative_active.size()) ==
                nr.representative_active_count);
        if (nr.serving_tier == Tier::Small) {
            CHECK(nr.representative_active_count >= 1);
            bool serving_active = false;
            for (int idx : nr.representative_active)
                serving_active |= idx == nr.serving_sbs_index;
            CHECK(serving_active);
        } else {
            CHECK(nr.representative_active_count >= 0);
        }
        CHECK(nr.representative_active_count <= p.n_s0);
        for (const Vec2& z : nr.macro_points)
            CHECK(z.norm() <= sim.window_radius * (1.0 + 1e-12));
        for (const Vec2& c : nr.parent_points)
            CHECK(c.norm() <= sim.window_radius * (1.0 + 1e-12));
        CHECK(nr.other_cluster_active_offsets.size() == nr.parent_points.size());
    }
    const double expected = p.lambda_m * M_PI * sim.window_radius *
                            sim.window_radius;
    CHECK(macro_count / draws == doctest::Approx(expected).epsilon(0.01));
    CHECK(statcheck::ks_pvalue(std::move(v0), [&](double t) {
              return 1.0 - std::exp(-0.5 * t * t / (p.sigma_u * p.sigma_u));
          }) > 0.01);
}

TEST_CASE("simulate_coverage is deterministic across thread counts") {
    const NetworkParams p = baseline();
    const ClusterKernel k = ClusterKernel::gaussian(p.sigma_s);
    SimConfig sim;
    sim.trials = 4000;
    sim.seed = 99;
    sim.batch_size = 512;

    sim.threads = 1;
    const CoverageReport a = simulate_coverage(p, k, Policy::P1, sim);
    sim.threads = 2;
    const CoverageReport b = simulate_coverage(p, k, Policy::P1, sim);
    sim.threads = 4;
    const CoverageReport c = simulate_coverage(p, k, Policy::P1, sim);

    CHECK(a.total_coverage == b.total_coverage);
    CHECK(a.per_tier_coverage.macro == b.per_tier_coverage.macro);
    CHECK(a.per_tier_coverage.small == b.per_tier_coverage.small);
    CHECK(a.assoc_prob_avg.small == b.assoc_prob_avg.small);
    CHECK(a.throughput == b.throughput);
    CHECK(a.half_width_95 == b.half_width_95);
    CHECK(b.total_coverage == c.total_coverage);

    // report structure
    CHECK(a.provenance == Provenance::Simulated);
    CHECK(a.trials == 4000);
    CHECK(a.total_coverage ==
          a.per_tier_coverage.macro + a.per_tier_coverage.small);
    CHECK(a.assoc_prob_avg.macro + a.assoc_prob_avg.small == 1.0);
    CHECK(a.half_width_95 > 0.0);
    CHECK(std::isfinite(a.half_width_95));

    // different seed moves the estimate
    sim.seed = 100;
    const CoverageReport d = simulate_coverage(p, k, Policy::P1, sim);
    CHECK(d.total_coverage != a.total_coverage);
}

TEST_CASE("tiny SIR threshold gives near-certain coverage") {
    NetworkParams p = baseline();
    p.beta = 1e-6;
    p.validate();
    const ClusterKernel k = ClusterKernel::gaussian(p.sigma_s);
    SimConfig sim;
    sim.trials = 20000;
    sim.seed = 5;
    for (const Policy policy : {Policy::P1, Policy::P2})
        CHECK(simulate_coverage(p, k, policy, sim).total_coverage >= 0.999);
}

TEST_CASE("classical single-tier reduction") {
    NetworkParams p = baseline();
    p.P_s = 1e-30;
    p.P_0 = 1e-20;
    p.nbar_as = 1e-12;
    p.validate();
    const ClusterKernel k = ClusterKernel::gaussian(p.sigma_s);
    SimConfig sim;
    sim.trials = 100000;
    sim.seed = 7;
    // the sparse pure-macro background needs a wider window than the
    // clustered baseline; the doubling-window check flags 3 km here
    sim.window_radius = 8.0;
    const CoverageReport r = simulate_coverage(p, k, Policy::P1, sim);
    CHECK(r.assoc_prob_avg.macro == doctest::Approx(1.0).epsilon(1e-4));
    // Pc = 1/(1 + sqrt(beta) atan(sqrt(beta))) at alpha = 4, beta = 1
    CHECK(std::abs(r.total_coverage - 0.5600991535115574) < 0.01);
}

TEST_CASE("window check flags far-field truncation") {
    const NetworkParams p = baseline();
    const ClusterKernel k = ClusterKernel::gaussian(p.sigma_s);
    SimConfig sim;
    sim.trials = 2000;
    sim.seed = 11;
    sim.window_radius = 0.25; // much too small at baseline densities
    const CoverageReport tight = simulate_coverage(p, k, Policy::P1, sim);
    CHECK(tight.window_warning);
    sim.window_radius = 3.0;
    const CoverageReport fine = simulate_coverage(p, k, Policy::P1, sim);
    CHECK_FALSE(fine.window_warning);
}

} // TEST_SUITE
