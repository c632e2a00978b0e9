#include <doctest.h>

#include <cmath>

#include "hetnet/association.hpp"
#include "support/params.hpp"
#include "support/statcheck.hpp"

using namespace hetnet;
using testsupport::baseline;

namespace {

// distances from the typical user to the n_s0 SBSs of one sampled cluster
std::vector<double> sample_cluster_distances(const ClusterKernel& k, double nu0,
                                             int n, Rng& rng) {
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) {
        const Vec2 off = k.sample_offset(rng);
        d[i] = std::hypot(nu0 + off.x, off.y);
    }
    return d;
}

double sample_nearest_macro(double lambda_m, Rng& rng) {
    return std::sqrt(-std::log(rng.uniform_pos()) / (M_PI * lambda_m));
}

double branch_normalization(const NetworkParams& p, const ClusterKernel& k,
                            Policy policy, Tier tier, double nu0, double x) {
    const double excl = interferer_exclusion_radius(p, policy, tier, x);
    numerics::QuadratureSpec spec;
    spec.relative_tolerance = 1e-9;
    spec.tail_scale = nu0 + 2.0 * k.radial_extent();
    std::vector<double> pts{excl};
    for (double b : {nu0 - k.radial_extent(), nu0, nu0 + k.radial_extent()})
        if (b > excl) pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.push_back(std::numeric_limits<double>::infinity());
    return numerics::integrate_or_throw(
        [&](double w) {
            return interferer_distance_pdf(p, k, policy, tier, w, nu0, x);
        },
        std::move(pts), spec, "interferer law normalization");
}

} // namespace

TEST_SUITE("association") {

TEST_CASE("network params invariants and cached derivations") {
    NetworkParams p = baseline();
    CHECK(p.xi_sm == doctest::Approx(std::pow(1e-3, 0.25)).epsilon(1e-12));
    CHECK(p.xi_ms == doctest::Approx(std::pow(1e3, 0.25)).epsilon(1e-12));
    CHECK(p.D_km == doctest::Approx(0.06).epsilon(1e-12));
    CHECK(p.P_s == doctest::Approx(199.52623149688796).epsilon(1e-12));

    p.alpha = 2.0;
    CHECK_THROWS_WITH_AS(p.validate(), "NetworkParams: alpha must exceed 2",
                         std::invalid_argument);
    p = baseline();
    p.n_s0 = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = baseline();
    p.lambda_p = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("nearest macro law") {
    const NetworkParams p = baseline();
    CHECK(nearest_macro_cdf(p, 0.0) == 0.0);
    // median at sqrt(ln 2 / pi) for unit density
    CHECK(nearest_macro_cdf(p, 0.4697186393498257) ==
          doctest::Approx(0.5).epsilon(1e-12));
    numerics::QuadratureSpec spec;
    spec.tail_scale = 1.0;
    CHECK(numerics::integrate_or_throw(
              [&](double r) { return nearest_macro_pdf(p, r); },
              {0.0, 2.0, std::numeric_limits<double>::infinity()}, spec,
              "fRm norm") == doctest::Approx(1.0).epsilon(1e-9));
    const ConditionalDistanceLaw law = nearest_macro_law(p);
    CHECK(law.pdf(0.3, 99.0) == nearest_macro_pdf(p, 0.3));
    CHECK(law.cdf(0.3, -1.0) == nearest_macro_cdf(p, 0.3));
}

TEST_CASE("nearest SBS law is the minimum order statistic") {
    NetworkParams p = baseline();
    const ClusterKernel k = ClusterKernel::gaussian(1.0);

    p.n_s0 = 1;
    p.validate();
    CHECK(nearest_sbs_cdf(p, k, 0.7, 0.4) ==
          doctest::Approx(distance_cdf_general(k, 0.7, 0.4)).epsilon(1e-12));

    p.n_s0 = 10;
    p.validate();
    const double fu = distance_cdf_general(k, 0.5, 1.0);
    CHECK(nearest_sbs_cdf(p, k, 0.5, 1.0) ==
          doctest::Approx(1.0 - std::pow(1.0 - fu, 10)).epsilon(1e-12));
    CHECK(nearest_sbs_cdf(p, k, 60.0, 1.0) == doctest::Approx(1.0).epsilon(1e-9));

    // Monte Carlo order-statistic oracle
    Rng rng(424242);
    const int trials = 100000;
    int below = 0;
    for (int t = 0; t < trials; ++t) {
        const auto d = sample_cluster_distances(k, 1.0, 10, rng);
        below += *std::min_element(d.begin(), d.end()) <= 0.5;
    }
    CHECK(static_cast<double>(below) / trials ==
          doctest::Approx(nearest_sbs_cdf(p, k, 0.5, 1.0)).epsilon(0.02));

    // pdf integrates to 1
    numerics::QuadratureSpec spec;
    spec.tail_scale = 3.0;
    CHECK(numerics::integrate_or_throw(
              [&](double r) { return nearest_sbs_pdf(p, k, r, 1.0); },
              {0.0, 1.0, 9.0, std::numeric_limits<double>::infinity()}, spec,
              "fRs norm") == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("policy 1 association probability") {
    const ClusterKernel k = ClusterKernel::gaussian(0.04);
    NetworkParams p = baseline();

    SUBCASE("silent small cells hand everything to the macro tier") {
        p.P_s = 1e-30;
        p.P_0 = 1e-20;
        p.validate();
        CHECK(assoc_prob_policy1(p, ClusterKernel::gaussian(p.sigma_s), 0.05,
                                 Tier::Macro) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }

    SUBCASE("tier probabilities are complementary") {
        for (double nu0 : {0.0, 0.02, 0.05, 0.2}) {
            const double am = assoc_prob_policy1(p, k, nu0, Tier::Macro);
            const double as = assoc_prob_policy1(p, k, nu0, Tier::Small);
            CHECK(am + as == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(am >= 0.0);
            CHECK(am <= 1.0);
        }
    }

    SUBCASE("matches the Monte Carlo association frequency") {
        const double nu0 = 0.05;
        Rng rng(777);
        const int trials = 100000;
        int macro = 0;
        for (int t = 0; t < trials; ++t) {
            const double rm = sample_nearest_macro(p.lambda_m, rng);
            const auto d = sample_cluster_distances(k, nu0, p.n_s0, rng);
            const double rs = *std::min_element(d.begin(), d.end());
            macro += p.P_m / pathloss_pow(rm, p.alpha) >=
                     p.P_s / pathloss_pow(rs, p.alpha);
        }
        const double analytic = assoc_prob_policy1(p, k, nu0, Tier::Macro);
        CHECK(std::abs(static_cast<double>(macro) / trials - analytic) < 0.005);
    }
}

TEST_CASE("policy 2 association probability") {
    const ClusterKernel k = ClusterKernel::gaussian(0.04);
    NetworkParams p = baseline();

    p.P_0 = 1e-30; // D enormous
    p.validate();
    CHECK(assoc_prob_policy2(p, k, 0.05, Tier::Small) ==
          doctest::Approx(1.0).epsilon(1e-9));
    p.P_0 = 1e30; // D tiny
    p.validate();
    CHECK(assoc_prob_policy2(p, k, 0.05, Tier::Small) ==
          doctest::Approx(0.0).epsilon(1e-9));

    // D = 2 sigma_s at the cluster center: 1 - exp(-2)^10
    p = baseline();
    p.P_0 = p.P_s * std::pow(2.0 * p.sigma_s, -p.alpha);
    p.validate();
    CHECK(p.D_km == doctest::Approx(2.0 * p.sigma_s).epsilon(1e-12));
    CHECK(assoc_prob_policy2(p, k, 0.0, Tier::Small) ==
          doctest::Approx(0.9999999979388464).epsilon(1e-10));

    SUBCASE("small-tier probability is non-decreasing in D") {
        double prev = -1.0;
        for (double d = 0.01; d <= 0.2; d += 0.01) {
            NetworkParams q = baseline();
            q.P_0 = q.P_s * std::pow(d, -q.alpha);
            q.validate();
            const double as = assoc_prob_policy2(q, k, 0.03, Tier::Small);
            CHECK(as >= prev - 1e-12);
            prev = as;
        }
    }
}

TEST_CASE("serving distance densities normalize on their support") {
    const NetworkParams p = baseline();
    const ClusterKernel k = ClusterKernel::gaussian(p.sigma_s);
    numerics::QuadratureSpec spec;
    spec.relative_tolerance = 1e-8;
    const double ext = k.radial_extent();

    for (double nu0 : {0.02, 0.06}) {
        spec.tail_scale = 2.0;
        CHECK(numerics::integrate_or_throw(
                  [&](double x) {
                      return serving_distance_pdf(p, k, Policy::P1, Tier::Macro,
                                                  x, nu0);
                  },
                  {0.0, 1.0, 4.0, std::numeric_limits<double>::infinity()},
                  spec, "P1 macro serving") ==
              doctest::Approx(1.0).epsilon(1e-6));
        CHECK(numerics::integrate_or_throw(
                  [&](double x) {
                      return serving_distance_pdf(p, k, Policy::P1, Tier::Small,
                                                  x, nu0);
                  },
                  {0.0, nu0, nu0 + ext}, spec, "P1 small serving") ==
              doctest::Approx(1.0).epsilon(1e-6));
        CHECK(numerics::integrate_or_throw(
                  [&](double x) {
                      return serving_distance_pdf(p, k, Policy::P2, Tier::Small,
                                                  x, nu0);
                  },
                  {0.0, 0.5 * p.D_km, p.D_km}, spec, "P2 small serving") ==
              doctest::Approx(1.0).epsilon(1e-6));
        // P2 macro: association does not constrain the macro distance
        for (double x : {0.1, 0.5, 1.5})
            CHECK(serving_distance_pdf(p, k, Policy::P2, Tier::Macro, x, nu0) ==
                  nearest_macro_pdf(p, x));
        CHECK(numerics::integrate_or_throw(
                  [&](double x) {
                      return serving_distance_pdf(p, k, Policy::P2, Tier::Macro,
                                                  x, nu0);
                  },
                  {0.0, 1.0, 4.0, std::numeric_limits<double>::infinity()},
                  spec, "P2 macro serving") ==
              doctest::Approx(1.0).epsilon(1e-6));
    }
    CHECK_THROWS_AS(serving_distance_pdf(p, k, Policy::P2, Tier::Small,
                                         p.D_km * 1.01, 0.05),
                    std::domain_error);
}

TEST_CASE("policy 1 small serving distances match simulation") {
    const NetworkParams p = baseline();
    const ClusterKernel k = ClusterKernel::gaussian(p.sigma_s);
    const double nu0 = 0.05;

    Rng rng(31337);
    std::vector<double> served;
    while (served.size() < 20000) {
        const double rm = sample_nearest_macro(p.lambda_m, rng);
        const auto d = sample_cluster_distances(k, nu0, p.n_s0, rng);
        const double rs = *std::min_element(d.begin(), d.end());
        if (p.P_s / pathloss_pow(rs, p.alpha) >
            p.P_m / pathloss_pow(rm, p.alpha))
            served.push_back(rs);
    }
    // tabulated CDF of the conditional serving-distance density
    const double hi = nu0 + k.radial_extent();
    std::vector<double> grid{0.0}, cdf{0.0};
    double acc = 0.0;
    const int cells = 400;
    for (int i = 1; i <= cells; ++i) {
        const double a = hi * (i - 1) / cells, b = hi * i / cells;
        numerics::detail::Segment seg;
        numerics::detail::gk15(
            [&](double x) {
                return serving_distance_pdf(p, k, Policy::P1, Tier::Small, x,
                                            nu0);
            },
            a, b, seg);
        acc += seg.value;
        grid.push_back(b);
        cdf.push_back(acc);
    }
    const numerics::PchipInterpolant interp(grid, cdf);
    const double pval = statcheck::ks_pvalue(std::move(served), [&](double x) {
        return x >= hi ? 1.0 : std::min(interp(x), 1.0);
    });
    CHECK(pval > 0.01);
}

TEST_CASE("interferer distance law: truncated renormalized kernel law") {
    const NetworkParams p = baseline();
    const ClusterKernel k = ClusterKernel::gaussian(p.sigma_s);
    const double nu0 = 0.05;

    // zero exclusion radius collapses to the unconditioned law
    for (double w : {0.01, 0.05, 0.12})
        CHECK(interferer_distance_pdf(p, k, Policy::P1, Tier::Macro, w, nu0,
                                      0.0) ==
              doctest::Approx(distance_pdf(k, w, nu0)).epsilon(1e-12));

    // below the exclusion radius the density vanishes
    CHECK(interferer_distance_pdf(p, k, Policy::P1, Tier::Small, 0.019, nu0,
                                  0.02) == 0.0);

    // every branch integrates to one beyond its exclusion radius
    CHECK(branch_normalization(p, k, Policy::P1, Tier::Macro, nu0, 0.3) ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK(branch_normalization(p, k, Policy::P1, Tier::Small, nu0, 0.02) ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK(branch_normalization(p, k, Policy::P2, Tier::Macro, nu0, 0.0) ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK(branch_normalization(p, k, Policy::P2, Tier::Small, nu0, 0.03) ==
          doctest::Approx(1.0).epsilon(1e-6));

    // degenerate conditioning: no kernel mass beyond the exclusion radius
    CHECK_THROWS_AS(interferer_distance_pdf(p, k, Policy::P1, Tier::Small, 2.0,
                                            nu0, 1.0),
                    std::domain_error);
}

} // TEST_SUITE
