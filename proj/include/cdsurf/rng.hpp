#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

namespace cdsurf {

// splitmix64 finalizer, used both as a stream-key mixer and to expand seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t key, std::uint64_t value) {
    return splitmix64(key ^ splitmix64(value));
}

inline std::uint64_t mix_seed_double(std::uint64_t key, double value) {
    return mix_seed(key, std::bit_cast<std::uint64_t>(value));
}

// xoshiro256++ keyed by a single 64-bit seed. Trials derive independent
// streams by mixing (master_seed, coordinates, stream id), so results do not
// depend on worker scheduling.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : s_) {
            x = splitmix64(x);
            w = x;
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = std::rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = std::rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // Rejection-free multiply-shift; bias is negligible for the small n
        // used here, but keep the standard unbiased loop for determinism
        // across platforms.
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Standard normal via Box-Muller on demand.
    double next_normal() {
        double u1 = 0.0;
        while (u1 == 0.0) u1 = next_double();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

  private:
    std::uint64_t s_[4];
};

}  // namespace cdsurf
