#include "hetnet/association.hpp"

#include <cmath>

namespace hetnet {

using numerics::QuadratureSpec;

void NetworkParams::validate() {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string("NetworkParams: ") + name +
                                        " must be positive and finite");
    };
    positive(lambda_m, "lambda_m");
    positive(lambda_p, "lambda_p");
    positive(nbar_as, "nbar_as");
    positive(sigma_s, "sigma_s");
    positive(sigma_u, "sigma_u");
    positive(P_m, "P_m");
    positive(P_s, "P_s");
    positive(P_0, "P_0");
    positive(beta, "beta");
    if (n_s0 < 1)
        throw std::invalid_argument("NetworkParams: n_s0 must be >= 1");
    if (!(alpha > 2.0))
        throw std::invalid_argument("NetworkParams: alpha must exceed 2");
    D_km = std::pow(P_0 / P_s, -1.0 / alpha);
    xi_sm = std::pow(P_s / P_m, 1.0 / alpha);
    xi_ms = std::pow(P_m / P_s, 1.0 / alpha);
}

double nearest_macro_pdf(const NetworkParams& p, double r) {
    if (r < 0.0) throw std::domain_error("nearest_macro_pdf: r must be >= 0");
    const double q = M_PI * p.lambda_m * r * r;
    return 2.0 * M_PI * p.lambda_m * r * std::exp(-q);
}

double nearest_macro_cdf(const NetworkParams& p, double r) {
    if (r < 0.0) throw std::domain_error("nearest_macro_cdf: r must be >= 0");
    return -std::expm1(-M_PI * p.lambda_m * r * r);
}

ConditionalDistanceLaw nearest_macro_law(const NetworkParams& p) {
    NetworkParams cp = p;
    return ConditionalDistanceLaw{
        [cp](double r, double) { return nearest_macro_pdf(cp, r); },
        [cp](double r, double) { return nearest_macro_cdf(cp, r); }};
}

double nearest_sbs_cdf(const NetworkParams& p, const ClusterKernel& kernel,
                       double r_s, double nu0) {
    const double fu = distance_cdf_general(kernel, r_s, nu0);
    return 1.0 - std::pow(1.0 - fu, p.n_s0);
}

double nearest_sbs_pdf(const NetworkParams& p, const ClusterKernel& kernel,
                       double r_s, double nu0) {
    const double fu = distance_cdf_general(kernel, r_s, nu0);
    return p.n_s0 * std::pow(1.0 - fu, p.n_s0 - 1) *
           distance_pdf(kernel, r_s, nu0);
}

namespace {

double macro_distance_scale(const NetworkParams& p) {
    return 1.0 / std::sqrt(M_PI * p.lambda_m);
}

} // namespace

double assoc_prob_policy1(const NetworkParams& p, const ClusterKernel& kernel,
                          double nu0, Tier tier) {
    if (nu0 < 0.0) throw std::domain_error("assoc_prob_policy1: nu0 must be >= 0");
    auto f = [&](double r) {
        const double fu = distance_cdf_general(kernel, p.xi_sm * r, nu0);
        return std::pow(1.0 - fu, p.n_s0) * nearest_macro_pdf(p, r);
    };
    QuadratureSpec spec;
    spec.relative_tolerance = 1e-9;
    spec.absolute_tolerance = 1e-13;
    const double rm = macro_distance_scale(p);
    spec.tail_scale = 2.0 * rm;
    // kernel features live at r ~ (nu0 +- extent)/xi_sm on the macro axis
    std::vector<double> pts{0.0};
    const double ext = kernel.radial_extent();
    for (double q : {(nu0 - ext) / p.xi_sm, (nu0 + ext) / p.xi_sm, rm, 3.0 * rm})
        if (q > 0.0 && std::isfinite(q)) pts.push_back(q);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    pts.push_back(std::numeric_limits<double>::infinity());
    const double am = numerics::integrate_or_throw(f, std::move(pts), spec,
                                                   "assoc_prob_policy1");
    const double clamped = std::clamp(am, 0.0, 1.0);
    return tier == Tier::Macro ? clamped : 1.0 - clamped;
}

double assoc_prob_policy2(const NetworkParams& p, const ClusterKernel& kernel,
                          double nu0, Tier tier) {
    if (nu0 < 0.0) throw std::domain_error("assoc_prob_policy2: nu0 must be >= 0");
    const double as = nearest_sbs_cdf(p, kernel, p.D_km, nu0);
    return tier == Tier::Small ? as : 1.0 - as;
}

double assoc_prob(const NetworkParams& p, const ClusterKernel& kernel,
                  Policy policy, double nu0, Tier tier) {
    return policy == Policy::P1 ? assoc_prob_policy1(p, kernel, nu0, tier)
                                : assoc_prob_policy2(p, kernel, nu0, tier);
}

double serving_distance_pdf(const NetworkParams& p, const ClusterKernel& kernel,
                            Policy policy, Tier tier, double x, double nu0) {
    if (x < 0.0) throw std::domain_error("serving_distance_pdf: x must be >= 0");
    if (policy == Policy::P1) {
        if (tier == Tier::Macro) {
            const double am = assoc_prob_policy1(p, kernel, nu0, Tier::Macro);
            const double surv =
                std::pow(1.0 - distance_cdf_general(kernel, p.xi_sm * x, nu0),
                         p.n_s0);
            return surv * nearest_macro_pdf(p, x) / am;
        }
        const double as = assoc_prob_policy1(p, kernel, nu0, Tier::Small);
        return (1.0 - nearest_macro_cdf(p, p.xi_ms * x)) *
               nearest_sbs_pdf(p, kernel, x, nu0) / as;
    }
    if (tier == Tier::Small) {
        if (x > p.D_km)
            throw std::domain_error(
                "serving_distance_pdf: Policy 2 small-cell serving distance "
                "exceeds D");
        const double as = assoc_prob_policy2(p, kernel, nu0, Tier::Small);
        return nearest_sbs_pdf(p, kernel, x, nu0) / as;
    }
    // Policy 2, macro: association does not constrain the macro distance
    return nearest_macro_pdf(p, x);
}

double interferer_exclusion_radius(const NetworkParams& p, Policy policy,
                                   Tier tier, double x) {
    if (policy == Policy::P2 && tier == Tier::Macro) return p.D_km;
    if (tier == Tier::Macro) return p.xi_sm * x;
    return x;
}

double interferer_distance_pdf(const NetworkParams& p, const ClusterKernel& kernel,
                               Policy policy, Tier tier, double w, double nu0,
                               double x) {
    const double excl = interferer_exclusion_radius(p, policy, tier, x);
    if (w < excl) return 0.0;
    const double denom = 1.0 - distance_cdf_general(kernel, excl, nu0);
    if (denom < 1e-12)
        throw std::domain_error(
            "interferer_distance_pdf: degenerate conditioning, no kernel mass "
            "beyond the exclusion radius");
    return distance_pdf(kernel, w, nu0) / denom;
}

} // namespace hetnet
