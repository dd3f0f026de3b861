#pragma once

#include <cassert>
#include <cstdint>
#include <random>

namespace cdnsim {

// Deterministic uniform stream used everywhere randomness is needed.
//
// std::mt19937_64's raw output is pinned by the standard, and the [0,1)
// mapping below sidesteps std::uniform_real_distribution, whose draw
// sequence is implementation-defined. Equal seeds therefore produce equal
// streams on every platform and toolchain.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) with 53-bit resolution. Consumes one draw.
    double next_unit() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // True with probability p. Consumes exactly one draw, even for p = 0
    // or p = 1, so callers' draw accounting stays uniform.
    bool bernoulli(double p) { return next_unit() < p; }

    // Uniform in [0, n), n >= 1. Consumes exactly one draw.
    std::size_t uniform_index(std::size_t n) {
        assert(n > 0);
        auto i = static_cast<std::size_t>(next_unit() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace cdnsim
