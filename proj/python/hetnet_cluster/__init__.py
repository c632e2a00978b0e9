"""Coverage and throughput of two-tier HetNets with clustered users and SBSs.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports its public surface.
"""

from ._core import (
    ClusterKernel,
    CoverageReport,
    NetworkParams,
    Policy,
    Tier,
    TierValue,
    __version__,
    assoc_prob,
    bessel_i0,
    bessel_i0_scaled,
    coverage,
    distance_cdf,
    distance_pdf,
    marcum_q1,
    nearest_sbs_cdf,
    optimal_threshold,
    simulate_coverage,
    sinc_alpha,
    throughput,
    user_center_distance_pdf,
)

__all__ = [
    "ClusterKernel",
    "CoverageReport",
    "NetworkParams",
    "Policy",
    "Tier",
    "TierValue",
    "__version__",
    "assoc_prob",
    "bessel_i0",
    "bessel_i0_scaled",
    "coverage",
    "distance_cdf",
    "distance_pdf",
    "marcum_q1",
    "nearest_sbs_cdf",
    "optimal_threshold",
    "simulate_coverage",
    "sinc_alpha",
    "throughput",
    "user_center_distance_pdf",
]
