#pragma once

#include "hetnet/association.hpp"

namespace hetnet {

// ExactTruncatedSum evaluates the finite sum over the (weighted) truncated
// Poisson active-SBS count; SimplifiedExponential is the small-nbar_as
// exponential proxy used for production numerics.
enum class IntraMode { ExactTruncatedSum, SimplifiedExponential };

inline const char* to_string(IntraMode m) {
    return m == IntraMode::ExactTruncatedSum ? "exact" : "simplified";
}

struct LaplaceContext {
    const NetworkParams* params = nullptr;
    const ClusterKernel* kernel = nullptr;
    Policy policy = Policy::P1;
    Tier tier = Tier::Macro;
    double nu0 = 0.0;
    double x = 0.0; // serving distance; ignored by Policy 2 / macro-served
    IntraMode mode = IntraMode::SimplifiedExponential;
};

// Laplace transform of the interference from simultaneously active
// open-access SBSs, conditioned on (nu0, x) as the branch requires.
double laplace_intra(const LaplaceContext& ctx, double s);

// Laplace transform of the interference from closed-access SBSs outside the
// representative cluster.  Independent of policy and serving tier by
// construction, which is why neither is accepted here.
double laplace_inter(const NetworkParams& p, const ClusterKernel& kernel,
                     double s);

// Laplace transform of the macro-tier interference.  Policy 2 small-served
// users take the closed form (no exclusion); every other branch integrates
// beyond xi_mj * x.
double laplace_macro(const NetworkParams& p, Policy policy, Tier tier, double s,
                     double x);

// normalized truncated Poisson weights on 0..n_max (conditioned_on_serving
// false) or the size-biased variant on 1..n_max (true)
std::vector<double> truncated_poisson_weights(double nbar, int n_max,
                                              bool conditioned_on_serving);

namespace detail {
// mean per-interferer suppression J/Q: J integrates s*Ps/(w^a + s*Ps)
// against the intra-cluster distance density beyond the exclusion radius,
// Q is the kernel mass beyond it.  Returns {J, Q}.
std::pair<double, double> intra_suppression(const NetworkParams& p,
                                            const ClusterKernel& kernel,
                                            double nu0, double excl, double s);
// assembles the intra Laplace value from the suppression ratio J/Q; the
// coverage integrals reuse Q for the association weight and call this
// directly
double intra_laplace_from_ratio(const NetworkParams& p, double ratio,
                                bool small_served, IntraMode mode);
// Lemma-10 evaluation through the substitution-based semi-infinite
// quadrature; cross-checks the truncated production path.
double laplace_inter_substitution(const NetworkParams& p,
                                  const ClusterKernel& kernel, double s);
} // namespace detail

} // namespace hetnet
