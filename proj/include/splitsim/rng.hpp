#pragma once

// Deterministic random number generation. All stochastic output in this
// project flows through these primitives so that a (seed, stream) pair fully
// determines every draw, independent of platform RNG libraries and of how
// work is scheduled across threads.

#include <cmath>
#include <cstdint>

namespace splitsim {

// SplitMix64 step. Advances the state and returns the next value.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derives an independent child seed from a root seed and a stream id.
// The finalizer is a bijection of the (root + C*(id+1)) input, so for a fixed
// root two distinct stream ids can never collide.
inline std::uint64_t child_seed(std::uint64_t root, std::uint64_t stream) {
    std::uint64_t x = root + 0x9E3779B97F4A7C15ULL * (stream + 1);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

inline std::uint64_t child_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b) {
    return child_seed(child_seed(root, a), b);
}

// xoshiro256++ with SplitMix64 state expansion.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : state_) w = splitmix64(x);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // +1 or -1 with equal probability.
    double rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

    // 0 or 1 with equal probability.
    double bit() { return static_cast<double>(next_u64() >> 63); }

    // Standard normal via the Marsaglia polar method; the second value of
    // each accepted pair is cached, so draw counts stay deterministic.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, q;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            q = u * u + v * v;
        } while (q >= 1.0 || q == 0.0);
        const double f = std::sqrt(-2.0 * std::log(q) / q);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    // Gamma(shape, 1) for shape >= 1 (Marsaglia-Tsang squeeze method).
    double gamma(double shape) {
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double t = 1.0 + c * x;
            if (t <= 0.0) continue;
            double v = t * t * t;
            double u = uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    // Student-t with df > 2, rescaled to unit variance.
    double student_t_standardized(double df) {
        const double z = normal();
        const double chi2 = 2.0 * gamma(0.5 * df);
        const double t = z / std::sqrt(chi2 / df);
        return t * std::sqrt((df - 2.0) / df);
    }

  private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::uint64_t state_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace splitsim
