#pragma once

#include "hetnet/association.hpp"

namespace testsupport {

// baseline evaluation setup: lambda_m=1, lambda_p=10 km^-2, alpha=4,
// beta=0 dB, P_m=10^3 P_s, P_s=23 dBm, n_s0=10, sigma_s=sigma_u=0.04 km
inline hetnet::NetworkParams baseline() {
    hetnet::NetworkParams p; // defaults carry exactly this setup
    p.validate();
    return p;
}

} // namespace testsupport
