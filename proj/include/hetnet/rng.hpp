#pragma once

#include <cmath>
#include <cstdint>

namespace hetnet {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// xoshiro256++ with splitmix64 seeding.  Substreams are derived from a
// (master seed, stream key) pair so trials and sweep points can be run in
// any order or thread layout and still reproduce bit-for-bit.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    static Rng substream(std::uint64_t master, std::uint64_t key) {
        std::uint64_t sm = master ^ (0xA0761D6478BD642FULL * (key + 1));
        splitmix64(sm);
        return Rng(splitmix64(sm));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform on [0,1) with 53 random bits
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    // uniform on (0,1], safe under log()
    double uniform_pos() { return ((next_u64() >> 11) + 1.0) * 0x1.0p-53; }

    double exponential() { return -std::log(uniform_pos()); }

    // one Box-Muller pair
    void normal_pair(double& z1, double& z2) {
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double th = 6.283185307179586476925286766559 * uniform();
        z1 = r * std::cos(th);
        z2 = r * std::sin(th);
    }

    double rayleigh(double sigma) {
        return sigma * std::sqrt(-2.0 * std::log(uniform_pos()));
    }

    // inversion sampling; large means split into chunks so the running
    // product never underflows
    std::uint64_t poisson(double mean) {
        if (!(mean > 0.0)) return 0;
        std::uint64_t total = 0;
        while (mean > 60.0) {
            total += poisson_small(60.0);
            mean -= 60.0;
        }
        return total + poisson_small(mean);
    }

    // index in [0, n)
    std::uint64_t uniform_index(std::uint64_t n) {
        // Lemire rejection-free-enough bounded draw (deterministic)
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t poisson_small(double mean) {
        const double u = uniform();
        double p = std::exp(-mean), cum = p;
        std::uint64_t k = 0;
        while (u > cum && k < 4000) {
            ++k;
            p *= mean / static_cast<double>(k);
            cum += p;
        }
        return k;
    }

    std::uint64_t s_[4];
};

} // namespace hetnet
