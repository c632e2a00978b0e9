#include "hetnet/laplace.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>

namespace hetnet {

using numerics::QuadratureSpec;

std::vector<double> truncated_poisson_weights(double nbar, int n_max,
                                              bool conditioned_on_serving) {
    if (!(nbar > 0.0)) throw std::invalid_argument("weights: nbar must be > 0");
    if (n_max < 1) throw std::invalid_argument("weights: n_max must be >= 1");
    // log-space weights, normalized after shifting by the maximum
    const int lo = conditioned_on_serving ? 1 : 0;
    const double ln = std::log(nbar);
    std::vector<double> lw;
    lw.reserve(n_max - lo + 1);
    for (int l = lo; l <= n_max; ++l) {
        const int k = conditioned_on_serving ? l - 1 : l;
        lw.push_back(k == 0 ? 0.0 : k * ln - std::lgamma(k + 1.0));
    }
    const double m = *std::max_element(lw.begin(), lw.end());
    double sum = 0.0;
    for (auto& v : lw) {
        v = std::exp(v - m);
        sum += v;
    }
    for (auto& v : lw) v /= sum;
    return lw;
}

namespace detail {

std::pair<double, double> intra_suppression(const NetworkParams& p,
                                            const ClusterKernel& kernel,
                                            double nu0, double excl, double s) {
    const double q = 1.0 - distance_cdf_general(kernel, excl, nu0);
    if (q < 1e-12) return {0.0, q};
    const double sPs = s * p.P_s;
    auto f = [&](double w) {
        return sPs / (pathloss_pow(w, p.alpha) + sPs) * distance_pdf(kernel, w, nu0);
    };
    QuadratureSpec spec;
    spec.relative_tolerance = 1e-8;
    spec.absolute_tolerance = 1e-14;
    const double ext = kernel.radial_extent();
    std::vector<double> pts{excl};
    for (double b : {nu0 - ext, nu0, nu0 + ext})
        if (b > excl) pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    spec.tail_scale = std::max(pts.back() - excl, ext);
    pts.push_back(std::numeric_limits<double>::infinity());
    const double j = numerics::integrate_or_throw(f, std::move(pts), spec,
                                                  "intra_suppression");
    return {std::clamp(j, 0.0, q), q};
}

} // namespace detail

namespace {

std::atomic<bool> simplified_warned{false};

void warn_simplified_range(const NetworkParams& p) {
    if (p.nbar_as > p.n_s0 / 3.0 && !simplified_warned.exchange(true))
        std::fprintf(stderr,
                     "hetnet: SimplifiedExponential intra Laplace used with "
                     "nbar_as=%.3g > n_s0/3=%.3g; proxy error may exceed the "
                     "small-nbar_as regime\n",
                     p.nbar_as, p.n_s0 / 3.0);
}

} // namespace

double laplace_intra(const LaplaceContext& ctx, double s) {
    if (!ctx.params || !ctx.kernel)
        throw std::invalid_argument("laplace_intra: context missing params/kernel");
    const NetworkParams& p = *ctx.params;
    if (s < 0.0) throw std::domain_error("laplace_intra: s must be >= 0");
    if (ctx.mode == IntraMode::ExactTruncatedSum && p.n_s0 > 30)
        throw std::invalid_argument(
            "laplace_intra: ExactTruncatedSum supports n_s0 <= 30");
    if (ctx.mode == IntraMode::SimplifiedExponential) warn_simplified_range(p);
    if (s == 0.0) return 1.0;

    const bool small_served = ctx.tier == Tier::Small;
    double excl;
    if (ctx.policy == Policy::P2 && !small_served) {
        excl = p.D_km;
    } else {
        if (!(ctx.x >= 0.0) || !std::isfinite(ctx.x))
            throw std::invalid_argument(
                "laplace_intra: branch requires a serving distance x");
        excl = small_served ? ctx.x : p.xi_sm * ctx.x;
    }

    const auto [j, q] = detail::intra_suppression(p, *ctx.kernel, ctx.nu0, excl, s);
    if (q < 1e-12) return 1.0; // no interferer can satisfy the conditioning
    return detail::intra_laplace_from_ratio(p, std::clamp(j / q, 0.0, 1.0),
                                            small_served, ctx.mode);
}

namespace detail {

double intra_laplace_from_ratio(const NetworkParams& p, double ratio,
                                bool small_served, IntraMode mode) {
    if (mode == IntraMode::SimplifiedExponential)
        return std::exp(-p.nbar_as * ratio);
    const double c = 1.0 - ratio;
    const auto w = truncated_poisson_weights(p.nbar_as, p.n_s0, small_served);
    double acc = 0.0, cpow = 1.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        acc += w[i] * cpow; // exponent l (macro-served) or l-1 (small-served)
        cpow *= c;
    }
    return std::clamp(acc, 0.0, 1.0);
}

} // namespace detail

namespace {

// inner integral of Lemma 10 at cluster distance nu
double inter_cluster_suppression(const NetworkParams& p,
                                 const ClusterKernel& kernel, double nu,
                                 double s) {
    const double sPs = s * p.P_s;
    auto f = [&](double t) {
        return sPs / (pathloss_pow(t, p.alpha) + sPs) *
               intercluster_distance_pdf(kernel, t, nu);
    };
    QuadratureSpec spec;
    spec.relative_tolerance = 1e-8;
    spec.absolute_tolerance = 1e-14;
    const double ext = kernel.radial_extent();
    std::vector<double> pts{0.0};
    for (double b : {nu - ext, nu, nu + ext})
        if (b > 0.0) pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    spec.tail_scale = std::max(ext, pts.back());
    pts.push_back(std::numeric_limits<double>::infinity());
    return numerics::integrate_or_throw(f, std::move(pts), spec,
                                        "laplace_inter inner");
}

double inter_exponent_truncation(const NetworkParams& p,
                                 const ClusterKernel& kernel, double s,
                                 double peak) {
    // walk outward until the bracket is negligible relative to its peak
    const double start =
        std::max(4.0 * kernel.radial_extent(),
                 4.0 * std::pow(s * p.P_s, 1.0 / p.alpha));
    double t = start;
    for (int i = 0; i < 60; ++i) {
        const double bracket =
            -std::expm1(-p.nbar_as * inter_cluster_suppression(p, kernel, t, s));
        if (bracket * t < 1e-12 * peak || t > 1e12) break;
        t *= 2.0;
    }
    return t * 2.0;
}

} // namespace

double laplace_inter(const NetworkParams& p, const ClusterKernel& kernel,
                     double s) {
    if (s < 0.0) throw std::domain_error("laplace_inter: s must be >= 0");
    if (s == 0.0) return 1.0;
    auto bracket = [&](double nu) {
        return -std::expm1(-p.nbar_as * inter_cluster_suppression(p, kernel, nu, s));
    };
    // peak scan over kernel and path-loss scales
    const double ext = kernel.radial_extent();
    const double ps = std::pow(s * p.P_s, 1.0 / p.alpha);
    double peak = 0.0;
    for (double nu : {0.25 * ext, ext, 2.0 * ext, ps, 2.0 * ps}) {
        if (nu > 0.0) peak = std::max(peak, bracket(nu) * std::max(nu, 1e-6));
    }
    const double hi = inter_exponent_truncation(p, kernel, s, std::max(peak, 1e-300));

    auto f = [&](double nu) { return bracket(nu) * nu; };
    QuadratureSpec spec;
    spec.relative_tolerance = 1e-7;
    spec.absolute_tolerance = 1e-13;
    std::vector<double> pts{0.0};
    for (double b : {0.5 * ext, 2.0 * ext, ps, 4.0 * std::max(ext, ps)})
        if (b > 0.0 && b < hi) pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    pts.push_back(hi);
    const double expo = numerics::integrate_or_throw(f, std::move(pts), spec,
                                                     "laplace_inter outer");
    return std::exp(-2.0 * M_PI * p.lambda_p * expo);
}

namespace detail {

double laplace_inter_substitution(const NetworkParams& p,
                                  const ClusterKernel& kernel, double s) {
    if (s == 0.0) return 1.0;
    auto f = [&](double nu) {
        return -std::expm1(-p.nbar_as *
                           inter_cluster_suppression(p, kernel, nu, s)) *
               nu;
    };
    QuadratureSpec spec;
    spec.relative_tolerance = 1e-7;
    spec.absolute_tolerance = 1e-13;
    const double ext = kernel.radial_extent();
    const double ps = std::pow(s * p.P_s, 1.0 / p.alpha);
    spec.tail_scale = 4.0 * std::max(ext, ps);
    std::vector<double> pts{0.0};
    for (double b : {0.5 * ext, 2.0 * ext, ps})
        if (b > 0.0) pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    pts.push_back(std::numeric_limits<double>::infinity());
    const double expo = numerics::integrate_or_throw(
        f, std::move(pts), spec, "laplace_inter substitution");
    return std::exp(-2.0 * M_PI * p.lambda_p * expo);
}

} // namespace detail

double laplace_macro(const NetworkParams& p, Policy policy, Tier tier, double s,
                     double x) {
    if (s < 0.0) throw std::domain_error("laplace_macro: s must be >= 0");
    if (s == 0.0) return 1.0;
    const double sPm = s * p.P_m;
    if (policy == Policy::P2 && tier == Tier::Small) {
        // no exclusion zone: closed form via sinc
        return std::exp(-M_PI * p.lambda_m * std::pow(sPm, 2.0 / p.alpha) /
                        numerics::sinc_alpha(p.alpha));
    }
    if (!(x >= 0.0) || !std::isfinite(x))
        throw std::invalid_argument("laplace_macro: branch requires x");
    const double lower = (tier == Tier::Macro) ? x : p.xi_ms * x;
    auto f = [&](double u) { return sPm / (pathloss_pow(u, p.alpha) + sPm) * u; };
    QuadratureSpec spec;
    spec.relative_tolerance = 1e-9;
    spec.absolute_tolerance = 1e-14;
    const double knee = std::pow(sPm, 1.0 / p.alpha);
    spec.tail_scale = 4.0 * std::max(knee, lower + 1e-12);
    std::vector<double> pts{lower};
    for (double b : {knee, 4.0 * knee})
        if (b > lower) pts.push_back(b);
    pts.push_back(std::numeric_limits<double>::infinity());
    const double expo = numerics::integrate_or_throw(f, std::move(pts), spec,
                                                     "laplace_macro");
    return std::exp(-2.0 * M_PI * p.lambda_m * expo);
}

} // namespace hetnet
