#pragma once

#include "hetnet/cluster_kernel.hpp"

namespace hetnet {

enum class Tier { Macro, Small };
enum class Policy { P1, P2 };

inline const char* to_string(Tier t) { return t == Tier::Macro ? "macro" : "small"; }
inline const char* to_string(Policy p) { return p == Policy::P1 ? "p1" : "p2"; }

// All quantities are linear and metric: densities in km^-2, distances in km,
// powers in mW.  Call validate() after filling the fields; it checks the
// invariants and caches the derived quantities.
struct NetworkParams {
    double lambda_m = 1.0;  // macro BS density
    double lambda_p = 10.0; // cluster-center density
    int n_s0 = 10;          // SBSs in the representative cluster
    double nbar_as = 3.0;   // mean simultaneously active SBSs per cluster
    double sigma_s = 0.04;  // SBS scattering scale
    double sigma_u = 0.04;  // user scattering scale
    double P_m = 199526.231496887960; // 53 dBm
    double P_s = 199.526231496887960; // 23 dBm
    double P_0 = 15395542.553772215;  // SBS power threshold (Policy 2); D = 0.06 km
    double alpha = 4.0;               // path-loss exponent
    double beta = 1.0;                // target SIR

    // derived, filled in by validate()
    double D_km = 0.0;   // (P_0/P_s)^(-1/alpha)
    double xi_sm = 0.0;  // (P_s/P_m)^(1/alpha)
    double xi_ms = 0.0;  // (P_m/P_s)^(1/alpha)

    void validate();
    NetworkParams validated() const {
        NetworkParams p = *this;
        p.validate();
        return p;
    }
};

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// t^alpha with fast paths for the common exponents; hot in every
// interference integrand and in the simulator
inline double pathloss_pow(double t, double alpha) {
    if (alpha == 4.0) {
        const double t2 = t * t;
        return t2 * t2;
    }
    if (alpha == 3.0) return t * t * t;
    return std::pow(t, alpha);
}

// nearest-macro distance law from the PPP null probability
double nearest_macro_pdf(const NetworkParams& p, double r);
double nearest_macro_cdf(const NetworkParams& p, double r);
ConditionalDistanceLaw nearest_macro_law(const NetworkParams& p);

// nearest open-access SBS: minimum of n_s0 i.i.d. intra-cluster distances
double nearest_sbs_cdf(const NetworkParams& p, const ClusterKernel& kernel,
                       double r_s, double nu0);
double nearest_sbs_pdf(const NetworkParams& p, const ClusterKernel& kernel,
                       double r_s, double nu0);

// association probability of a user at distance nu0 from its cluster center
double assoc_prob_policy1(const NetworkParams& p, const ClusterKernel& kernel,
                          double nu0, Tier tier);
double assoc_prob_policy2(const NetworkParams& p, const ClusterKernel& kernel,
                          double nu0, Tier tier);
double assoc_prob(const NetworkParams& p, const ClusterKernel& kernel,
                  Policy policy, double nu0, Tier tier);

// serving-distance density conditioned on association to the given tier
double serving_distance_pdf(const NetworkParams& p, const ClusterKernel& kernel,
                            Policy policy, Tier tier, double x, double nu0);

// distance below which no open-access SBS interferer can exist when the
// serving distance is x
double interferer_exclusion_radius(const NetworkParams& p, Policy policy,
                                   Tier tier, double x);

// truncated-renormalized intra-cluster distance density of an open-access
// interferer; zero below the exclusion radius.  Throws std::domain_error on
// degenerate conditioning (no kernel mass beyond the exclusion radius).
double interferer_distance_pdf(const NetworkParams& p, const ClusterKernel& kernel,
                               Policy policy, Tier tier, double w, double nu0,
                               double x);

} // namespace hetnet
