#include "hetnet/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

namespace hetnet {

namespace {

struct ActiveTables {
    std::vector<double> cdf_any;     // counts 0..n_max
    std::vector<double> cdf_serving; // counts 1..n_max (size-biased)
};

std::vector<double> cdf_from_weights(const std::vector<double>& w) {
    std::vector<double> cdf(w.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        acc += w[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;
    return cdf;
}

ActiveTables make_active_tables(double nbar, int n_max) {
    return {cdf_from_weights(truncated_poisson_weights(nbar, n_max, false)),
            cdf_from_weights(truncated_poisson_weights(nbar, n_max, true))};
}

int draw_from_cdf(const std::vector<double>& cdf, int first, Rng& rng) {
    const double u = rng.uniform();
    for (std::size_t i = 0; i < cdf.size(); ++i)
        if (u <= cdf[i]) return first + static_cast<int>(i);
    return first + static_cast<int>(cdf.size()) - 1;
}

double draw_v0(const NetworkParams& p, const ClusterKernel& kernel, Rng& rng) {
    if (kernel.is_gaussian()) return rng.rayleigh(p.sigma_u);
    return kernel.sample_offset(rng).norm();
}

void fill_ppp_disk(double lambda, double radius, Rng& rng,
                   std::vector<Vec2>& out) {
    out.clear();
    const std::uint64_t n = rng.poisson(lambda * M_PI * radius * radius);
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const double r = radius * std::sqrt(rng.uniform());
        const double a = 2.0 * M_PI * rng.uniform();
        out.push_back({r * std::cos(a), r * std::sin(a)});
    }
}

struct Workspace {
    std::vector<int> indices;
};

void sample_realization_into(const NetworkParams& p, const ClusterKernel& kernel,
                             Policy policy, const SimConfig& sim,
                             const ActiveTables& tables, Rng& rng,
                             Workspace& ws, NetworkRealization& out) {
    out.v0 = draw_v0(p, kernel, rng);
    out.representative_center = {out.v0, 0.0};

    fill_ppp_disk(p.lambda_m, sim.window_radius, rng, out.macro_points);
    fill_ppp_disk(p.lambda_p, sim.window_radius, rng, out.parent_points);

    out.representative_sbs_offsets.clear();
    out.representative_sbs_offsets.reserve(p.n_s0);
    double r_s = std::numeric_limits<double>::infinity();
    int nearest_idx = -1;
    for (int i = 0; i < p.n_s0; ++i) {
        const Vec2 off = kernel.sample_offset(rng);
        out.representative_sbs_offsets.push_back(off);
        const double d = std::hypot(out.v0 + off.x, off.y);
        if (d < r_s) {
            r_s = d;
            nearest_idx = i;
        }
    }
    double r_m = std::numeric_limits<double>::infinity();
    for (const Vec2& z : out.macro_points) r_m = std::min(r_m, z.norm());
    out.nearest_macro = r_m;
    out.nearest_sbs = r_s;

    bool small_served;
    if (policy == Policy::P1) {
        const double pw_m = p.P_m / pathloss_pow(r_m, p.alpha);
        const double pw_s = p.P_s / pathloss_pow(r_s, p.alpha);
        small_served = pw_s > pw_m;
    } else {
        small_served = r_s <= p.D_km;
    }
    out.serving_tier = small_served ? Tier::Small : Tier::Macro;
    out.serving_distance = small_served ? r_s : r_m;
    out.serving_sbs_index = small_served ? nearest_idx : -1;

    // representative active set: the count law depends on whether the
    // serving BS is one of the cluster's SBSs (size-biased when it is); the
    // active subset is uniform over the eligible SBSs
    out.representative_active_count =
        draw_from_cdf(small_served ? tables.cdf_serving : tables.cdf_any,
                      small_served ? 1 : 0, rng);
    auto& idx = ws.indices;
    idx.resize(p.n_s0);
    for (int i = 0; i < p.n_s0; ++i) idx[i] = i;
    int fixed = 0;
    if (small_served) {
        std::swap(idx[0], idx[nearest_idx]);
        fixed = 1;
    }
    for (int i = fixed; i < out.representative_active_count; ++i) {
        const int j =
            i + static_cast<int>(rng.uniform_index(p.n_s0 - i));
        std::swap(idx[i], idx[j]);
    }
    out.representative_active.assign(
        idx.begin(), idx.begin() + out.representative_active_count);

    // non-representative clusters: plain Poisson active counts
    out.other_cluster_active_offsets.resize(out.parent_points.size());
    for (std::size_t c = 0; c < out.parent_points.size(); ++c) {
        auto& offs = out.other_cluster_active_offsets[c];
        offs.clear();
        const std::uint64_t n = rng.poisson(p.nbar_as);
        offs.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i)
            offs.push_back(kernel.sample_offset(rng));
    }
}

struct TrialOutcome {
    Tier tier;
    bool covered;
    double interference;
};

TrialOutcome evaluate_sir(const NetworkParams& p, Policy policy,
                          const NetworkRealization& nr, Rng& rng) {
    const bool small_served = nr.serving_tier == Tier::Small;

    // exclusion-zone guard (Policy 1 couples the tiers): the non-serving
    // tier's nearest open-access BS must not beat the serving BS in
    // xi-scaled distance
    if (policy == Policy::P1) {
        const double slack = 1.0 + 1e-9;
        const bool violated =
            small_served ? nr.nearest_macro * slack < p.xi_ms * nr.nearest_sbs
                         : nr.nearest_sbs * slack < p.xi_sm * nr.nearest_macro;
        if (violated)
            throw std::logic_error("simulate_coverage: exclusion zone violated");
    }

    double interference = 0.0;
    int skip_macro = -1;
    if (!small_served) {
        // serving macro is the nearest one
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < nr.macro_points.size(); ++i) {
            const double d = nr.macro_points[i].norm();
            if (d < best) {
                best = d;
                skip_macro = static_cast<int>(i);
            }
        }
    }
    for (std::size_t i = 0; i < nr.macro_points.size(); ++i) {
        if (static_cast<int>(i) == skip_macro) continue;
        interference += p.P_m * rng.exponential() /
                        pathloss_pow(nr.macro_points[i].norm(), p.alpha);
    }
    for (int i : nr.representative_active) {
        if (small_served && i == nr.serving_sbs_index) continue;
        const Vec2& off = nr.representative_sbs_offsets[i];
        const double d = std::hypot(nr.v0 + off.x, off.y);
        interference += p.P_s * rng.exponential() / pathloss_pow(d, p.alpha);
    }
    for (std::size_t c = 0; c < nr.parent_points.size(); ++c) {
        const Vec2& ctr = nr.parent_points[c];
        for (const Vec2& off : nr.other_cluster_active_offsets[c]) {
            const double d = std::hypot(ctr.x + off.x, ctr.y + off.y);
            interference += p.P_s * rng.exponential() / pathloss_pow(d, p.alpha);
        }
    }

    const double tx = small_served ? p.P_s : p.P_m;
    const double signal =
        tx * rng.exponential() / pathloss_pow(nr.serving_distance, p.alpha);
    const bool covered =
        interference > 0.0 ? signal > p.beta * interference
                           : std::isfinite(signal) && signal > 0.0;
    return {nr.serving_tier, covered, interference};
}

double wilson_half_width(std::uint64_t k, std::uint64_t n) {
    if (n == 0) return 0.0;
    const double z = 1.959963984540054;
    const double z2 = z * z;
    const double nn = static_cast<double>(n);
    const double phat = static_cast<double>(k) / nn;
    return z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) /
           (1.0 + z2 / nn);
}

struct BatchSums {
    std::uint64_t assoc_small = 0, hit_macro = 0, hit_small = 0;
    double interference = 0.0;
};

} // namespace

int sample_truncated_poisson(double nbar, int n_max, bool conditioned_on_serving,
                             Rng& rng) {
    const auto w = truncated_poisson_weights(nbar, n_max, conditioned_on_serving);
    return draw_from_cdf(cdf_from_weights(w), conditioned_on_serving ? 1 : 0,
                         rng);
}

NetworkRealization sample_realization(const NetworkParams& params,
                                      const ClusterKernel& kernel,
                                      Policy policy, const SimConfig& sim,
                                      Rng& rng) {
    sim.check();
    NetworkParams p = params.validated();
    const ActiveTables tables = make_active_tables(p.nbar_as, p.n_s0);
    Workspace ws;
    NetworkRealization nr;
    sample_realization_into(p, kernel, policy, sim, tables, rng, ws, nr);
    return nr;
}

CoverageReport simulate_coverage(const NetworkParams& params,
                                 const ClusterKernel& kernel, Policy policy,
                                 const SimConfig& sim) {
    sim.check();
    const NetworkParams p = params.validated();
    const ActiveTables tables = make_active_tables(p.nbar_as, p.n_s0);

    const std::uint64_t nbatch =
        (sim.trials + sim.batch_size - 1) / sim.batch_size;
    std::vector<BatchSums> batches(nbatch);

    int threads = sim.threads > 0 ? sim.threads
                                  : static_cast<int>(std::max(
                                        1u, std::thread::hardware_concurrency()));
    threads = static_cast<int>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), nbatch));

    std::atomic<std::uint64_t> next_batch{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        Workspace ws;
        NetworkRealization nr;
        for (std::uint64_t b = next_batch.fetch_add(1); b < nbatch;
             b = next_batch.fetch_add(1)) {
            if (failed.load()) return;
            BatchSums sums;
            const std::uint64_t lo = b * sim.batch_size;
            const std::uint64_t hi = std::min(sim.trials, lo + sim.batch_size);
            for (std::uint64_t t = lo; t < hi; ++t) {
                Rng rng = Rng::substream(sim.seed, t);
                try {
                    sample_realization_into(p, kernel, policy, sim, tables, rng,
                                            ws, nr);
                    const TrialOutcome o = evaluate_sir(p, policy, nr, rng);
                    if (o.tier == Tier::Small) {
                        ++sums.assoc_small;
                        sums.hit_small += o.covered;
                    } else {
                        sums.hit_macro += o.covered;
                    }
                    sums.interference += o.interference;
                } catch (const std::exception& e) {
                    bool expected = false;
                    if (failed.compare_exchange_strong(expected, true)) {
                        std::lock_guard<std::mutex> lk(failure_mutex);
                        failure = e.what();
                    }
                    return;
                }
            }
            batches[b] = sums;
        }
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw std::runtime_error("simulate_coverage: " + failure);

    // fixed batch-order reduction keeps the double sums thread-count
    // independent
    std::uint64_t assoc_small = 0, hit_m = 0, hit_s = 0;
    double interference_sum = 0.0;
    for (const BatchSums& b : batches) {
        assoc_small += b.assoc_small;
        hit_m += b.hit_macro;
        hit_s += b.hit_small;
        interference_sum += b.interference;
    }

    const double n = static_cast<double>(sim.trials);
    CoverageReport r;
    r.policy = policy;
    r.provenance = Provenance::Simulated;
    r.trials = sim.trials;
    r.per_tier_coverage.macro = hit_m / n;
    r.per_tier_coverage.small = hit_s / n;
    r.total_coverage = (hit_m + hit_s) / n;
    r.assoc_prob_avg.small = assoc_small / n;
    r.assoc_prob_avg.macro = 1.0 - r.assoc_prob_avg.small;
    r.coverage_half_width.macro = wilson_half_width(hit_m, sim.trials);
    r.coverage_half_width.small = wilson_half_width(hit_s, sim.trials);
    r.half_width_95 = wilson_half_width(hit_m + hit_s, sim.trials);
    r.throughput_share.macro =
        p.lambda_m * r.per_tier_coverage.macro * std::log2(1.0 + p.beta);
    r.throughput_share.small = p.lambda_p * p.nbar_as *
                               r.per_tier_coverage.small *
                               std::log2(1.0 + p.beta);
    r.throughput = r.throughput_share.macro + r.throughput_share.small;

    // doubling-window spot check: first-order estimate of what the ring
    // [R, 2R] would add to the mean interference
    const double R = sim.window_radius;
    const double ring = 2.0 * M_PI *
                        (p.lambda_m * p.P_m + p.lambda_p * p.nbar_as * p.P_s) *
                        (std::pow(R, 2.0 - p.alpha) -
                         std::pow(2.0 * R, 2.0 - p.alpha)) /
                        (p.alpha - 2.0);
    const double mean_i = interference_sum / n;
    if (mean_i > 0.0 && ring > 1e-3 * mean_i) {
        r.window_warning = true;
        std::fprintf(stderr,
                     "hetnet: simulation window radius %.3g km may be too "
                     "small (far-field ring ~%.2g%% of mean interference)\n",
                     R, 100.0 * ring / mean_i);
    }
    return r;
}

} // namespace hetnet
