#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace vpp {

/// Deterministic RNG used everywhere randomness is needed. Draws are defined
/// in terms of raw mt19937_64 words so sequences do not depend on the
/// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform over [0, 255]; exact since 256 divides 2^64.
    std::uint8_t byte() { return static_cast<std::uint8_t>(engine_() & 0xFFu); }

    /// Uniform over [0, n) via rejection sampling (no modulo bias).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t rem = (max % n + 1) % n;  // 2^64 mod n
        const std::uint64_t limit = max - rem;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r > limit);
        return r % n;
    }

    /// Uniform over [0, 1).
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

}  // namespace vpp
