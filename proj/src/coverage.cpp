#include "hetnet/coverage.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace hetnet {

using numerics::QuadratureSpec;

namespace {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// fn(i) for i in [0, n); results land in caller-owned storage so the
// reduction order stays fixed regardless of the thread count
template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

ClusterKernel default_user_kernel(const NetworkParams& p,
                                  const ClusterKernel& sbs) {
    return sbs.is_gaussian() ? ClusterKernel::gaussian(p.sigma_u) : sbs;
}

} // namespace

CoverageEngine::CoverageEngine(const NetworkParams& params,
                               const ClusterKernel& sbs_kernel,
                               const ClusterKernel& user_kernel,
                               CoverageOptions options)
    : params_(params.validated()), sbs_(sbs_kernel), user_(user_kernel),
      opt_(options) {
    build();
}

CoverageEngine::CoverageEngine(const NetworkParams& params,
                               const ClusterKernel& sbs_kernel,
                               CoverageOptions options)
    : CoverageEngine(params, sbs_kernel, default_user_kernel(params, sbs_kernel),
                     options) {}

void CoverageEngine::build() {
    nu0_max_ = 1.25 * user_.radial_extent();
    x_max_macro_ = std::sqrt(42.0 / (M_PI * params_.lambda_m));

    const auto gl = numerics::gauss_legendre(opt_.outer_nodes);
    outer_rule_.reserve(gl.size());
    for (const auto& [t, w] : gl) {
        const double nu0 = 0.5 * nu0_max_ * (t + 1.0);
        const double weight =
            0.5 * nu0_max_ * w * user_center_distance_pdf(user_, nu0);
        outer_rule_.emplace_back(nu0, weight);
    }

    // inter-cluster Laplace table over the s-range the coverage integrals
    // can request; below-range values are handled by the s^(2/alpha) tail
    const double ext = sbs_.radial_extent();
    const double x_cap_s = nu0_max_ + ext;
    double s_max = 2.0 * params_.beta *
                   std::max(pathloss_pow(x_max_macro_, params_.alpha) / params_.P_m,
                            pathloss_pow(x_cap_s, params_.alpha) / params_.P_s);
    double s_min = s_max * 1e-12;
    for (int i = 0; i < 8; ++i) {
        if (-std::log(laplace_inter(params_, sbs_, s_min)) < 1e-8) break;
        s_min *= 0.1;
    }
    const int n = std::max(opt_.inter_table_nodes, 8);
    std::vector<double> ls(n), ll(n);
    const double lo = std::log(s_min), hi = std::log(s_max);
    for (int i = 0; i < n; ++i) ls[i] = lo + (hi - lo) * i / (n - 1);
    parallel_for(n, resolve_threads(opt_.threads), [&](int i) {
        ll[i] = std::log(laplace_inter(params_, sbs_, std::exp(ls[i])));
    });
    inter_table_ = numerics::PchipInterpolant(std::move(ls), std::move(ll));
}

double CoverageEngine::inter_laplace(double s) const {
    if (s <= 0.0) return 1.0;
    const double t = std::log(s);
    if (t < inter_table_.x_min()) {
        // shot-noise exponent scales as s^(2/alpha) at both ends
        const double edge = inter_table_(inter_table_.x_min());
        return std::exp(edge * std::exp((t - inter_table_.x_min()) * 2.0 /
                                        params_.alpha));
    }
    if (t > inter_table_.x_max()) return laplace_inter(params_, sbs_, s);
    return std::exp(inter_table_(t));
}

namespace {

struct InnerSetup {
    std::vector<double> points;
    double hi;
};

} // namespace

// association-weighted coverage density integrated over the serving
// distance; the weight A_j(nu0) f_X(x|nu0) is assembled jointly so no
// near-zero association probability is ever divided out
double CoverageEngine::serving_integral(const NetworkParams& p, Policy policy,
                                        Tier tier, double nu0) const {
    const double ext = sbs_.radial_extent();
    QuadratureSpec spec;
    spec.relative_tolerance = opt_.inner_rel_tol;
    spec.absolute_tolerance = 1e-12;

    auto assemble_points = [&](std::initializer_list<double> cands, double hi) {
        std::vector<double> pts{0.0};
        for (double c : cands)
            if (c > 0.0 && c < hi) pts.push_back(c);
        pts.push_back(hi);
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        return pts;
    };

    if (tier == Tier::Macro) {
        const bool p2 = policy == Policy::P2;
        // Policy 2: the SBS exclusion radius is D regardless of x
        double q_d = 1.0, w_d = 1.0;
        if (p2) {
            q_d = 1.0 - distance_cdf_general(sbs_, p.D_km, nu0);
            w_d = std::pow(q_d, p.n_s0);
            if (w_d <= 0.0) return 0.0;
        }
        auto f = [&](double x) {
            const double s = p.beta * pathloss_pow(x, p.alpha) / p.P_m;
            const double excl = p2 ? p.D_km : p.xi_sm * x;
            const auto [j, q] = detail::intra_suppression(p, sbs_, nu0, excl, s);
            double weight, l_intra;
            if (q < 1e-12) {
                if (!p2) return 0.0; // survival weight q^n_s0 vanishes
                weight = w_d;
                l_intra = 1.0;
            } else {
                weight = p2 ? w_d : std::pow(q, p.n_s0);
                l_intra = detail::intra_laplace_from_ratio(
                    p, std::clamp(j / q, 0.0, 1.0), false, opt_.mode);
            }
            return weight * nearest_macro_pdf(p, x) * l_intra * inter_laplace(s) *
                   laplace_macro(p, policy, Tier::Macro, s, x);
        };
        const double rm = 1.0 / std::sqrt(M_PI * p.lambda_m);
        auto pts = assemble_points({(nu0 - ext) / p.xi_sm, (nu0 + ext) / p.xi_sm,
                                    0.5 * rm, rm, 2.5 * rm},
                                   x_max_macro_);
        return numerics::integrate_or_throw(f, std::move(pts), spec,
                                            "coverage macro-tier x-integral");
    }

    // small tier: serving SBS at x, intra interferers beyond x
    const bool p2 = policy == Policy::P2;
    double hi = nu0 + ext;
    if (p2) hi = std::min(hi, p.D_km);
    if (hi <= 0.0) return 0.0;
    auto f = [&](double x) {
        const double s = p.beta * pathloss_pow(x, p.alpha) / p.P_s;
        const auto [j, q] = detail::intra_suppression(p, sbs_, nu0, x, s);
        if (q < 1e-12) return 0.0; // f_Rs carries q^(n_s0-1)
        const double fu = distance_pdf(sbs_, x, nu0);
        double joint = p.n_s0 * std::pow(q, p.n_s0 - 1) * fu;
        if (!p2) joint *= 1.0 - nearest_macro_cdf(p, p.xi_ms * x);
        const double l_intra = detail::intra_laplace_from_ratio(
            p, std::clamp(j / q, 0.0, 1.0), true, opt_.mode);
        return joint * l_intra * inter_laplace(s) *
               laplace_macro(p, policy, Tier::Small, s, x);
    };
    auto pts = assemble_points({nu0 - ext, 0.25 * nu0 + 0.1 * ext, nu0}, hi);
    return numerics::integrate_or_throw(f, std::move(pts), spec,
                                        "coverage small-tier x-integral");
}

double CoverageEngine::outer_average(
    const std::function<double(double)>& f) const {
    if (opt_.full_adaptive_outer) {
        auto g = [&](double nu0) {
            return user_center_distance_pdf(user_, nu0) * f(nu0);
        };
        QuadratureSpec spec;
        spec.relative_tolerance = 1e-6;
        spec.absolute_tolerance = 1e-10;
        const double su = user_.scale();
        return numerics::integrate_or_throw(
            g, {0.0, su, 3.0 * su, nu0_max_}, spec, "coverage outer integral");
    }
    std::vector<double> vals(outer_rule_.size());
    parallel_for(static_cast<int>(outer_rule_.size()),
                 resolve_threads(opt_.threads),
                 [&](int i) { vals[i] = f(outer_rule_[i].first); });
    double acc = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i)
        acc += outer_rule_[i].second * vals[i];
    return acc;
}

double CoverageEngine::tier_coverage(const NetworkParams& p, Policy policy,
                                     Tier tier) const {
    return outer_average(
        [&](double nu0) { return serving_integral(p, policy, tier, nu0); });
}

CoverageReport CoverageEngine::coverage_impl(const NetworkParams& p,
                                             Policy policy) const {
    CoverageReport r;
    r.policy = policy;
    r.provenance = Provenance::Analytic;
    r.mode = opt_.mode;
    r.per_tier_coverage.macro = tier_coverage(p, policy, Tier::Macro);
    r.per_tier_coverage.small = tier_coverage(p, policy, Tier::Small);
    r.total_coverage = r.per_tier_coverage.macro + r.per_tier_coverage.small;
    const double am = outer_average([&](double nu0) {
        return assoc_prob(p, sbs_, policy, nu0, Tier::Macro);
    });
    r.assoc_prob_avg.macro = std::clamp(am, 0.0, 1.0);
    r.assoc_prob_avg.small = 1.0 - r.assoc_prob_avg.macro;
    const double se = std::log2(1.0 + p.beta);
    r.throughput_share.macro = p.lambda_m * r.per_tier_coverage.macro * se;
    r.throughput_share.small =
        p.lambda_p * p.nbar_as * r.per_tier_coverage.small * se;
    r.throughput = r.throughput_share.macro + r.throughput_share.small;
    return r;
}

CoverageReport CoverageEngine::coverage(Policy policy) const {
    return coverage_impl(params_, policy);
}

// Policy-2 evaluation with an overridden distance threshold; the cached
// inter-cluster table is P_0-independent, so one engine serves a D sweep.
CoverageReport CoverageEngine::coverage_with_threshold(double d_km) const {
    return coverage_impl(with_distance_threshold(params_, d_km), Policy::P2);
}

CoverageReport coverage_policy1(const NetworkParams& params,
                                const ClusterKernel& kernel,
                                const CoverageOptions& options) {
    return CoverageEngine(params, kernel, options).coverage(Policy::P1);
}

CoverageReport coverage_policy2(const NetworkParams& params,
                                const ClusterKernel& kernel,
                                const CoverageOptions& options) {
    return CoverageEngine(params, kernel, options).coverage(Policy::P2);
}

double throughput(const NetworkParams& params, double coverage_macro,
                  double coverage_small, Policy) {
    if (!(coverage_macro >= 0.0 && coverage_macro <= 1.0) ||
        !(coverage_small >= 0.0 && coverage_small <= 1.0))
        throw std::domain_error("throughput: coverage values must be in [0,1]");
    // same arithmetic for both policies; per-tier active density times
    // per-tier success probability
    return (params.lambda_m * coverage_macro +
            params.lambda_p * params.nbar_as * coverage_small) *
           std::log2(1.0 + params.beta);
}

NetworkParams with_distance_threshold(const NetworkParams& params, double d_km) {
    if (!(d_km > 0.0) || !std::isfinite(d_km))
        throw std::invalid_argument("with_distance_threshold: D must be positive");
    NetworkParams p = params;
    p.P_0 = p.P_s * std::pow(d_km, -p.alpha);
    p.validate();
    return p;
}

std::pair<double, double> optimal_threshold(const NetworkParams& params,
                                            const ClusterKernel& kernel,
                                            const std::vector<double>& d_grid,
                                            const CoverageOptions& options) {
    if (d_grid.empty())
        throw std::invalid_argument("optimal_threshold: empty grid");
    for (std::size_t i = 0; i + 1 < d_grid.size(); ++i)
        if (!(d_grid[i] < d_grid[i + 1]))
            throw std::invalid_argument(
                "optimal_threshold: grid must be strictly increasing");

    const CoverageEngine engine(params, kernel, options);
    auto eval = [&](double d) {
        return engine.coverage_with_threshold(d).total_coverage;
    };
    std::size_t best = 0;
    std::vector<double> cov(d_grid.size());
    for (std::size_t i = 0; i < d_grid.size(); ++i) {
        cov[i] = eval(d_grid[i]);
        if (cov[i] > cov[best]) best = i; // ties keep the smaller D
    }
    double best_d = d_grid[best], best_cov = cov[best];
    if (best > 0 && best + 1 < d_grid.size()) {
        // one golden-section pass between the neighbours of the best point
        constexpr double kInvPhi = 0.6180339887498949;
        double lo = d_grid[best - 1], hi = d_grid[best + 1];
        double a = hi - kInvPhi * (hi - lo), b = lo + kInvPhi * (hi - lo);
        double fa = eval(a), fb = eval(b);
        for (int it = 0; it < 10; ++it) {
            if (fa > best_cov || (fa == best_cov && a < best_d)) {
                best_cov = fa;
                best_d = a;
            }
            if (fb > best_cov || (fb == best_cov && b < best_d)) {
                best_cov = fb;
                best_d = b;
            }
            if (fa >= fb) {
                hi = b;
                b = a;
                fb = fa;
                a = hi - kInvPhi * (hi - lo);
                fa = eval(a);
            } else {
                lo = a;
                a = b;
                fa = fb;
                b = lo + kInvPhi * (hi - lo);
                fb = eval(b);
            }
        }
    }
    return {best_d, best_cov};
}

} // namespace hetnet
