#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace finprint {

// SplitMix64 (Steele, Lea, Flood 2014).  The std::* distributions are
// implementation-defined; seed-determinism contracts need a fixed algorithm
// that yields the same stream on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1): 53 mantissa bits
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in {0, ..., n-1}; modulo bias is < 2^-53 for any n we use
    std::uint64_t next_below(std::uint64_t n) {
        return n == 0 ? 0 : next_u64() % n;
    }

    // standard normal via Box-Muller; consumes two uniforms per pair,
    // caches the second deviate
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        double u2 = next_double();
        if (u1 < 1e-300) u1 = 1e-300;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Deterministic seed derivation for independent sub-streams (per run, per
// cell, per stage). FNV-1a style mix of the base seed and stream tags.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag_a,
                                 std::uint64_t tag_b = 0, std::uint64_t tag_c = 0) {
    std::uint64_t h = 1469598103934665603ULL ^ base;
    for (std::uint64_t t : {tag_a, tag_b, tag_c}) {
        for (int i = 0; i < 8; ++i) {
            h ^= (t >> (8 * i)) & 0xff;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

} // namespace finprint
