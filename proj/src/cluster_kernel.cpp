#include "hetnet/cluster_kernel.hpp"

#include <algorithm>
#include <cmath>

namespace hetnet {

using numerics::QuadratureSpec;

namespace {

constexpr double kTailMass = 1e-12;

QuadratureSpec kernel_quad() {
    QuadratureSpec spec;
    spec.relative_tolerance = 1e-9;
    spec.absolute_tolerance = 1e-14;
    return spec;
}

// angular integral of the kernel around a center at distance nu from the
// circle's origin: f(t|nu) = t * Int_0^{2pi} pdf2d(t cos a - nu, t sin a) da.
// This is Eq.-(8)-style single-integral form after z1 = t cos a.
double radial_shifted_pdf(const ClusterKernel& k, double t, double nu) {
    if (t <= 0.0) return 0.0;
    // the kernel support meets the circle only on an arc; seed the arc edge
    // at the exact extent (hard-edged kernels) and at 1.5x (soft tails)
    auto f = [&](double a) {
        return k.pdf2d(t * std::cos(a) - nu, t * std::sin(a));
    };
    std::vector<double> pts{0.0};
    if (t * nu > 0.0) {
        for (double factor : {1.0, 1.5}) {
            const double ee = factor * k.radial_extent();
            const double c = (t * t + nu * nu - ee * ee) / (2.0 * t * nu);
            const double am = std::acos(std::clamp(c, -1.0, 1.0));
            if (am > 0.0 && am < M_PI) pts.push_back(am);
        }
    }
    pts.push_back(M_PI);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const double half =
        numerics::integrate_or_throw(f, std::move(pts), kernel_quad(),
                                     "radial_shifted_pdf");
    return 2.0 * t * half;
}

} // namespace

ClusterKernel ClusterKernel::gaussian(double sigma_km) {
    if (!(sigma_km > 0.0) || !std::isfinite(sigma_km))
        throw std::invalid_argument("ClusterKernel: sigma must be positive");
    ClusterKernel k;
    k.kind_ = Kind::Gaussian;
    k.sigma_ = sigma_km;
    k.scale_ = sigma_km;
    k.extent_ = sigma_km * std::sqrt(-2.0 * std::log(kTailMass));
    return k;
}

ClusterKernel ClusterKernel::custom(std::function<double(double, double)> pdf2d,
                                    double scale_km) {
    if (!pdf2d) throw std::invalid_argument("ClusterKernel: null pdf");
    if (!(scale_km > 0.0) || !std::isfinite(scale_km))
        throw std::invalid_argument("ClusterKernel: scale must be positive");
    ClusterKernel k;
    k.kind_ = Kind::Custom;
    k.pdf_ = std::move(pdf2d);
    k.scale_ = scale_km;

    // isotropy probe: compare the density over 16 angles at several radii;
    // the radii avoid round multiples of the scale so a jump in the density
    // (e.g. a disk edge) is not sampled exactly on the boundary
    for (double f : {0.0487, 0.1943, 0.4857, 0.9713, 1.9426, 3.8852, 7.7704}) {
        const double r = f * scale_km;
        double mean = 0.0, lo = 1e308, hi = 0.0;
        for (int i = 0; i < 16; ++i) {
            const double a = 2.0 * M_PI * i / 16.0 + 0.1234;
            const double p = k.pdf_(r * std::cos(a), r * std::sin(a));
            if (!(p >= 0.0) || !std::isfinite(p))
                throw std::invalid_argument(
                    "ClusterKernel: pdf must be finite and non-negative");
            mean += p;
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        mean /= 16.0;
        if (mean > 1e-300 && (hi - lo) > 1e-6 * mean)
            throw std::invalid_argument(
                "ClusterKernel: custom kernel is not isotropic");
    }

    auto radial = [&k](double r) { return 2.0 * M_PI * r * k.pdf_(r, 0.0); };

    QuadratureSpec spec = kernel_quad();
    spec.tail_scale = 8.0 * scale_km;
    const double total = numerics::integrate_or_throw(
        radial,
        {0.0, 0.5 * scale_km, 2.0 * scale_km, 8.0 * scale_km,
         std::numeric_limits<double>::infinity()},
        spec, "ClusterKernel normalization");
    if (std::abs(total - 1.0) > 1e-6)
        throw std::invalid_argument(
            "ClusterKernel: pdf integrates to " + std::to_string(total) +
            ", expected 1");

    // locate the small-tail radius by doubling plus bisection; a tight
    // extent seeds all downstream quadratures, so narrow far-away arcs are
    // never missed by a coarse first pass.  The tail is computed as total
    // minus the mass below r: integrating upward from 0 keeps the quadrature
    // anchored in the bulk of the kernel.  The cutoff sits above the
    // quadrature noise floor, unlike the analytic Gaussian extent.
    constexpr double kCustomTail = 1e-9;
    auto tail_mass = [&](double r) {
        std::vector<double> pts{0.0};
        for (double b : {0.5 * scale_km, scale_km, 4.0 * scale_km})
            if (b < r) pts.push_back(b);
        pts.push_back(r);
        QuadratureSpec s2 = kernel_quad();
        s2.relative_tolerance = 1e-12;
        s2.absolute_tolerance = 1e-16;
        return total - numerics::integrate_or_throw(radial, std::move(pts), s2,
                                                    "ClusterKernel mass");
    };
    double hi = scale_km;
    for (int i = 0; i < 25 && tail_mass(hi) >= kCustomTail; ++i) hi *= 2.0;
    double lo = 0.5 * hi;
    for (int i = 0; i < 30; ++i) {
        const double mid = 0.5 * (lo + hi);
        (tail_mass(mid) < kCustomTail ? hi : lo) = mid;
    }
    k.extent_ = hi;

    // cumulative radial mass -> inverse CDF table for sampling
    const int cells = 2048;
    std::vector<double> r(cells + 1), m(cells + 1);
    r[0] = 0.0;
    m[0] = 0.0;
    for (int i = 1; i <= cells; ++i) {
        r[i] = k.extent_ * i / cells;
        numerics::detail::Segment seg;
        numerics::detail::gk15(radial, r[i - 1], r[i], seg);
        m[i] = m[i - 1] + seg.value;
    }
    for (auto& v : m) v /= m[cells];
    std::vector<double> mx, rx;
    mx.push_back(m[0]);
    rx.push_back(r[0]);
    for (int i = 1; i <= cells; ++i) {
        if (m[i] > mx.back() + 1e-14) {
            mx.push_back(m[i]);
            rx.push_back(r[i]);
        }
    }
    k.inv_radial_cdf_ = std::make_shared<const numerics::PchipInterpolant>(
        std::move(mx), std::move(rx));
    return k;
}

double ClusterKernel::sigma() const {
    if (kind_ != Kind::Gaussian)
        throw std::logic_error("ClusterKernel: sigma() on a custom kernel");
    return sigma_;
}

double ClusterKernel::pdf2d(double y1, double y2) const {
    if (kind_ == Kind::Gaussian) {
        const double q = (y1 * y1 + y2 * y2) / (2.0 * sigma_ * sigma_);
        return std::exp(-q) / (2.0 * M_PI * sigma_ * sigma_);
    }
    return pdf_(y1, y2);
}

Vec2 ClusterKernel::sample_offset(Rng& rng) const {
    if (kind_ == Kind::Gaussian) {
        double z1, z2;
        rng.normal_pair(z1, z2);
        return {sigma_ * z1, sigma_ * z2};
    }
    const double u = std::clamp(rng.uniform(), inv_radial_cdf_->x_min(),
                                inv_radial_cdf_->x_max());
    const double r = (*inv_radial_cdf_)(u);
    const double a = 2.0 * M_PI * rng.uniform();
    return {r * std::cos(a), r * std::sin(a)};
}

double distance_pdf(const ClusterKernel& kernel, double u, double nu0) {
    if (u < 0.0 || nu0 < 0.0)
        throw std::domain_error("distance_pdf: distances must be >= 0");
    if (u == 0.0) return 0.0;
    if (kernel.is_gaussian()) {
        const double s2 = kernel.sigma() * kernel.sigma();
        const double d = u - nu0;
        // Rician density with the Bessel factor kept in scaled form
        return (u / s2) * std::exp(-0.5 * d * d / s2) *
               numerics::bessel_i0_scaled(u * nu0 / s2);
    }
    return radial_shifted_pdf(kernel, u, nu0);
}

double distance_cdf_general(const ClusterKernel& kernel, double u, double nu0) {
    if (u < 0.0 || nu0 < 0.0)
        throw std::domain_error("distance_cdf_general: distances must be >= 0");
    if (u == 0.0) return 0.0;
    if (kernel.is_gaussian()) {
        const double s = kernel.sigma();
        return std::clamp(1.0 - numerics::marcum_q1(nu0 / s, u / s), 0.0, 1.0);
    }
    return detail::distance_cdf_polar(kernel, u, nu0);
}

double user_center_distance_pdf(const ClusterKernel& user_kernel, double nu0) {
    if (nu0 < 0.0)
        throw std::domain_error("user_center_distance_pdf: nu0 must be >= 0");
    if (nu0 == 0.0) return 0.0;
    if (user_kernel.is_gaussian()) {
        const double s2 = user_kernel.sigma() * user_kernel.sigma();
        return (nu0 / s2) * std::exp(-0.5 * nu0 * nu0 / s2);
    }
    return radial_shifted_pdf(user_kernel, nu0, 0.0);
}

double intercluster_distance_pdf(const ClusterKernel& sbs_kernel, double t,
                                 double nu) {
    // same law as the intra-cluster distance, conditioned on the other
    // cluster's center distance
    return distance_pdf(sbs_kernel, t, nu);
}

ConditionalDistanceLaw make_distance_law(const ClusterKernel& kernel) {
    ClusterKernel k = kernel;
    return ConditionalDistanceLaw{
        [k](double t, double nu) { return distance_pdf(k, t, nu); },
        [k](double t, double nu) { return distance_cdf_general(k, t, nu); }};
}

namespace detail {

double distance_cdf_polar(const ClusterKernel& kernel, double u, double nu0) {
    if (u <= 0.0) return 0.0;
    auto f = [&](double t) { return distance_pdf(kernel, t, nu0); };
    const double ext = kernel.radial_extent();
    std::vector<double> pts{0.0};
    for (double p : {nu0 - ext, nu0, nu0 + ext})
        if (p > 0.0 && p < u) pts.push_back(p);
    pts.push_back(u);
    std::sort(pts.begin(), pts.end());
    QuadratureSpec spec = kernel_quad();
    spec.relative_tolerance = 1e-8;
    const double v = numerics::integrate_or_throw(f, std::move(pts), spec,
                                                  "distance_cdf_polar");
    return std::clamp(v, 0.0, 1.0);
}

double distance_cdf_cartesian(const ClusterKernel& kernel, double u, double nu0) {
    if (u <= 0.0) return 0.0;
    QuadratureSpec spec = kernel_quad();
    spec.relative_tolerance = 1e-8;
    auto outer = [&](double z1) {
        const double w = std::sqrt(std::max(0.0, u * u - z1 * z1));
        if (w == 0.0) return 0.0;
        auto inner = [&](double z2) { return kernel.pdf2d(z1 - nu0, z2); };
        return numerics::integrate_or_throw(inner, -w, w, spec,
                                            "distance_cdf_cartesian inner");
    };
    const double v = numerics::integrate_or_throw(outer, -u, u, spec,
                                                  "distance_cdf_cartesian");
    return std::clamp(v, 0.0, 1.0);
}

} // namespace detail

} // namespace hetnet
