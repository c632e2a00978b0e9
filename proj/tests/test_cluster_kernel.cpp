#include <doctest.h>

#include <cmath>

#include "hetnet/cluster_kernel.hpp"
#include "support/statcheck.hpp"

using namespace hetnet;

namespace {

ClusterKernel gaussian_as_custom(double sigma) {
    return ClusterKernel::custom(
        [sigma](double y1, double y2) {
            return std::exp(-0.5 * (y1 * y1 + y2 * y2) / (sigma * sigma)) /
                   (2.0 * M_PI * sigma * sigma);
        },
        sigma);
}

ClusterKernel uniform_disk(double radius) {
    return ClusterKernel::custom(
        [radius](double y1, double y2) {
            return (y1 * y1 + y2 * y2 < radius * radius)
                       ? 1.0 / (M_PI * radius * radius)
                       : 0.0;
        },
        radius);
}

double pdf_normalization(const ClusterKernel& k, double nu0) {
    numerics::QuadratureSpec spec;
    spec.relative_tolerance = 1e-9;
    spec.tail_scale = nu0 + 2.0 * k.radial_extent();
    return numerics::integrate_or_throw(
        [&](double u) { return distance_pdf(k, u, nu0); },
        {0.0, 0.5 * nu0 + 0.1 * k.scale(), nu0 + k.radial_extent(),
         std::numeric_limits<double>::infinity()},
        spec, "pdf normalization");
}

} // namespace

TEST_SUITE("cluster_kernel") {

TEST_CASE("gaussian distance cdf: closed form and limits") {
    const ClusterKernel k = ClusterKernel::gaussian(1.0);
    CHECK(distance_cdf_general(k, 0.0, 0.7) == 0.0);
    // 1 - Q1(1, 2)
    CHECK(distance_cdf_general(k, 2.0, 1.0) ==
          doctest::Approx(0.7309879399640900).epsilon(1e-9));
    const ClusterKernel half = ClusterKernel::gaussian(0.5);
    CHECK(distance_cdf_general(half, 20.0 * 0.5 + 1.0, 1.0) ==
          doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("gaussian distance pdf: Rician closed form") {
    const ClusterKernel k = ClusterKernel::gaussian(1.0);
    // nu0 = 0 reduces to Rayleigh
    for (double u : {0.2, 1.0, 2.5}) {
        CHECK(distance_pdf(k, u, 0.0) ==
              doctest::Approx(u * std::exp(-0.5 * u * u)).epsilon(1e-12));
    }
    // e^{-1} I0(1)
    CHECK(distance_pdf(k, 1.0, 1.0) ==
          doctest::Approx(0.4657596075936404).epsilon(1e-12));
    // overflow-safe far from the center: u*nu0/sigma^2 >> 700
    const ClusterKernel tight = ClusterKernel::gaussian(0.04);
    const double v = distance_pdf(tight, 5.0, 5.0);
    CHECK(std::isfinite(v));
    CHECK(v == doctest::Approx(5.0 / (0.04 * 0.04) *
                               numerics::bessel_i0_scaled(5.0 * 5.0 /
                                                          (0.04 * 0.04)))
                   .epsilon(1e-10));
}

TEST_CASE("user center distance pdf") {
    const ClusterKernel k = ClusterKernel::gaussian(1.0);
    CHECK(user_center_distance_pdf(k, 0.0) == 0.0);
    CHECK(user_center_distance_pdf(k, 1.0) ==
          doctest::Approx(0.6065306597126334).epsilon(1e-12));
    numerics::QuadratureSpec spec;
    spec.tail_scale = 4.0;
    const double total = numerics::integrate_or_throw(
        [&](double v) { return user_center_distance_pdf(k, v); },
        {0.0, 1.0, 8.0, std::numeric_limits<double>::infinity()}, spec,
        "fV0 norm");
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("intercluster distance pdf mirrors the intra-cluster law") {
    const ClusterKernel k = ClusterKernel::gaussian(1.0);
    CHECK(intercluster_distance_pdf(k, 0.8, 0.0) ==
          doctest::Approx(0.8 * std::exp(-0.5 * 0.64)).epsilon(1e-12));
    CHECK(intercluster_distance_pdf(k, 2.0, 3.0) == distance_pdf(k, 2.0, 3.0));
    for (double nu : {0.1, 1.0, 5.0})
        CHECK(pdf_normalization(k, nu) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("every distance pdf integrates to one") {
    for (double sigma : {0.04, 0.5}) {
        const ClusterKernel k = ClusterKernel::gaussian(sigma);
        for (double nu0 : {0.0, 0.05, 0.3})
            CHECK(pdf_normalization(k, nu0) == doctest::Approx(1.0).epsilon(1e-6));
    }
    const ClusterKernel disk = uniform_disk(1.0);
    for (double nu0 : {0.0, 0.5, 2.0})
        CHECK(pdf_normalization(disk, nu0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("custom kernel path agrees with the gaussian fast path") {
    const ClusterKernel fast = ClusterKernel::gaussian(1.0);
    const ClusterKernel slow = gaussian_as_custom(1.0);
    CHECK(distance_pdf(slow, 1.3, 0.7) ==
          doctest::Approx(distance_pdf(fast, 1.3, 0.7)).epsilon(1e-6));
    // dual-path equivalence on a (u, nu0) grid
    for (int i = 1; i <= 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            const double u = 0.4 * i;
            const double nu0 = 0.4 * j;
            const double a = distance_cdf_general(slow, u, nu0);
            const double b = distance_cdf_general(fast, u, nu0);
            CHECK(std::abs(a - b) < 1e-6);
        }
    }
}

TEST_CASE("cartesian and polar cdf routes agree") {
    const ClusterKernel slow = gaussian_as_custom(0.8);
    for (double u : {0.5, 1.2, 2.4})
        for (double nu0 : {0.0, 0.6, 1.5})
            CHECK(detail::distance_cdf_cartesian(slow, u, nu0) ==
                  doctest::Approx(detail::distance_cdf_polar(slow, u, nu0))
                      .epsilon(1e-6));
}

TEST_CASE("cdf/pdf consistency by numerical differentiation") {
    const ClusterKernel k = ClusterKernel::gaussian(0.6);
    const double h = 1e-5;
    for (double nu0 : {0.0, 0.4, 1.1}) {
        for (double u : {0.3, 0.8, 1.6}) {
            const double deriv = (distance_cdf_general(k, u + h, nu0) -
                                  distance_cdf_general(k, u - h, nu0)) /
                                 (2.0 * h);
            CHECK(deriv == doctest::Approx(distance_pdf(k, u, nu0)).epsilon(1e-4));
        }
    }
}

TEST_CASE("sampled offsets follow the conditional distance law") {
    const double nu0 = 0.45;
    SUBCASE("gaussian kernel") {
        const ClusterKernel k = ClusterKernel::gaussian(0.3);
        Rng rng(99123);
        std::vector<double> d;
        d.reserve(100000);
        for (int i = 0; i < 100000; ++i) {
            const Vec2 off = k.sample_offset(rng);
            d.push_back(std::hypot(nu0 + off.x, off.y));
        }
        const double p = statcheck::ks_pvalue(
            std::move(d),
            [&](double u) { return distance_cdf_general(k, u, nu0); });
        CHECK(p > 0.01);
    }
    SUBCASE("custom disk kernel, interpolated cdf") {
        const ClusterKernel k = uniform_disk(0.8);
        Rng rng(7);
        std::vector<double> d;
        d.reserve(20000);
        for (int i = 0; i < 20000; ++i) {
            const Vec2 off = k.sample_offset(rng);
            d.push_back(std::hypot(nu0 + off.x, off.y));
        }
        std::vector<double> grid, cdf;
        for (int i = 0; i <= 200; ++i) {
            grid.push_back(2.0 * i / 200.0);
            cdf.push_back(i == 0 ? 0.0 : distance_cdf_general(k, grid[i], nu0));
        }
        const numerics::PchipInterpolant interp(grid, cdf);
        const double p = statcheck::ks_pvalue(
            std::move(d), [&](double u) { return interp(std::min(u, 2.0)); });
        CHECK(p > 0.01);
    }
}

TEST_CASE("kernel construction rejects bad input") {
    CHECK_THROWS_AS(ClusterKernel::gaussian(0.0), std::invalid_argument);
    CHECK_THROWS_AS(ClusterKernel::gaussian(-1.0), std::invalid_argument);
    // anisotropic density
    CHECK_THROWS_AS(ClusterKernel::custom(
                        [](double y1, double y2) {
                            return std::exp(-0.5 * (y1 * y1 + 4.0 * y2 * y2)) /
                                   M_PI;
                        },
                        1.0),
                    std::invalid_argument);
    // not normalized
    CHECK_THROWS_AS(ClusterKernel::custom(
                        [](double y1, double y2) {
                            return std::exp(-0.5 * (y1 * y1 + y2 * y2)) / M_PI;
                        },
                        1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(distance_pdf(ClusterKernel::gaussian(1.0), -0.1, 0.0),
                    std::domain_error);
}

TEST_CASE("conditional law closures") {
    const ClusterKernel k = ClusterKernel::gaussian(0.5);
    const ConditionalDistanceLaw law = make_distance_law(k);
    CHECK(law.pdf(0.4, 0.2) == distance_pdf(k, 0.4, 0.2));
    CHECK(law.cdf(0.4, 0.2) == distance_cdf_general(k, 0.4, 0.2));
    CHECK(law.cdf(0.0, 0.5) == 0.0);
}

} // TEST_SUITE
