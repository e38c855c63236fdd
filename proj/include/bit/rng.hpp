#pragma once

#include <cmath>
#include <cstdint>

namespace bit {

/// Deterministic, platform-independent random generator (PCG32 with a
/// splitmix64-expanded seed). Golden files depend on this exact sequence,
/// so the algorithm is fixed rather than delegated to <random>, whose
/// distributions vary between standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        state_ = 0;
        increment_ = (splitmix64(stream ^ 0xda3e39cb94b95bdbULL) << 1u) | 1u;
        next_u32();
        state_ += splitmix64(seed);
        next_u32();
    }

    /// Independent child stream, stable under (seed, index) pairs.
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(seed, index);
    }

    std::uint32_t next_u32() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + increment_;
        auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        auto rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    std::uint64_t next_u64() {
        return (static_cast<std::uint64_t>(next_u32()) << 32) | next_u32();
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; one cached value per pair.
    double gaussian() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        cached_ = radius * std::sin(angle);
        has_cached_ = true;
        return radius * std::cos(angle);
    }

    double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

private:
    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t state_ = 0;
    std::uint64_t increment_ = 0;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace bit
