#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ost {

// One splitmix64 step. Used to derive independent stream seeds from a single
// master seed, so a whole randomized run is pinned by one command-line value.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Deterministic value streams on top of mt19937_64. The distributions are
// spelled out by hand because <random> leaves distribution algorithms
// implementation-defined, which would break same-seed reproducibility across
// toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

    double uniform_in(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi], rejection-sampled so no value is favored.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t range = std::uint64_t(hi - lo) + 1;
        if (range == 0) return std::int64_t(gen_()); // full 64-bit span
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
        std::uint64_t raw;
        do {
            raw = gen_();
        } while (raw >= limit);
        return lo + std::int64_t(raw % range);
    }

    // Standard normal via Box-Muller; the companion value is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // Offset keeps the first uniform in (0, 1] and the log finite.
        const double u1 = double((gen_() >> 11) + 1) * 0x1.0p-53;
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace ost
