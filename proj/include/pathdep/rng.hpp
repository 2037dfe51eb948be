#pragma once

#include <cstdint>
#include <cmath>

namespace pathdep {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// Stream layout used throughout the project:
//   key     = 64-bit root seed (lo, hi words)
//   counter = (draw_lo, draw_hi, stream_lo, stream_hi)
// where `stream` is the path index (or another caller-chosen stream id).
// Serial and parallel runs consume identical values because every draw is
// addressed by (seed, stream, draw counter) alone.
struct Philox4x32 {
    static inline void block(std::uint64_t seed, std::uint64_t stream,
                             std::uint64_t draw, std::uint32_t out[4]) {
        std::uint32_t c[4] = {
            static_cast<std::uint32_t>(draw),
            static_cast<std::uint32_t>(draw >> 32),
            static_cast<std::uint32_t>(stream),
            static_cast<std::uint32_t>(stream >> 32)};
        std::uint32_t k0 = static_cast<std::uint32_t>(seed);
        std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                k0 += 0x9E3779B9u;
                k1 += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t(0xD2511F53u) * c[0];
            const std::uint64_t p1 = std::uint64_t(0xCD9E8D57u) * c[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t n0 = hi1 ^ c[1] ^ k0;
            const std::uint32_t n1 = lo1;
            const std::uint32_t n2 = hi0 ^ c[3] ^ k1;
            const std::uint32_t n3 = lo0;
            c[0] = n0;
            c[1] = n1;
            c[2] = n2;
            c[3] = n3;
        }
        out[0] = c[0];
        out[1] = c[1];
        out[2] = c[2];
        out[3] = c[3];
    }
};

// SplitMix64 finalizer, used to derive child seeds for nested simulations
// (inner ensembles, event banks, probe paths). derive_seed(seed, tag, index)
// is the documented derivation rule; tags are small module-level constants.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag,
                                 std::uint64_t index) {
    return mix64(mix64(seed ^ 0xA076'1D64'78BD'642Full * tag) + index);
}

namespace seed_tag {
inline constexpr std::uint64_t simulate = 1;
inline constexpr std::uint64_t inner = 2;
inline constexpr std::uint64_t probe = 3;
inline constexpr std::uint64_t scenario = 4;
} // namespace seed_tag

// Per-stream sampler. One instance per simulated path; all consumption is
// sequential within the stream, so thread scheduling cannot reorder draws.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    std::uint32_t next_u32() {
        if (pos_ == 4) {
            Philox4x32::block(seed_, stream_, draw_++, buf_);
            pos_ = 0;
        }
        return buf_[pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t hi = next_u32();
        const std::uint64_t lo = next_u32();
        return (hi << 32) | lo;
    }

    // uniform on [0,1), 53 random bits
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform on (0,1], safe as a log() argument
    double uniform_pos() { return 1.0 - uniform(); }

    // standard normal via Box-Muller; the spare variate is cached so a pair
    // of uniforms yields two normals
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Poisson by CDF inversion of a single uniform; exact for the small
    // per-step intensities used here (mass * dt), usable up to lambda ~ 30
    long poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        const double u = uniform();
        double p = std::exp(-lambda);
        double cdf = p;
        long k = 0;
        while (u > cdf && k < 1024) {
            ++k;
            p *= lambda / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t draw_ = 0;
    std::uint32_t buf_[4] = {0, 0, 0, 0};
    int pos_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace pathdep
