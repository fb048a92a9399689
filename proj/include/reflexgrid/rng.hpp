#pragma once

// Counter-based random numbers. Every draw is a pure function of
// (seed, step, agent id), so evaluation order and threading cannot change
// a trajectory.
//
// Generator: Philox4x32 with 10 rounds (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3", SC'11), keyed by the 64-bit seed split into
// two 32-bit words (low word first). The 128-bit counter is
// {step low, step high, agent low, agent high}. A uniform double takes the
// top 53 bits of (out[1] << 32 | out[0]) and scales by 2^-53, giving
// values in [0, 1). This mapping is frozen; changing it changes every
// stochastic trace.

#include <array>
#include <cstdint>

namespace reflexgrid::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

constexpr Counter philox4x32_10(Counter ctr, Key key) noexcept {
    constexpr std::uint32_t mul0 = 0xD2511F53;
    constexpr std::uint32_t mul1 = 0xCD9E8D57;
    constexpr std::uint32_t weyl0 = 0x9E3779B9;
    constexpr std::uint32_t weyl1 = 0xBB67AE85;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t{mul0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{mul1} * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += weyl0;
        key[1] += weyl1;
    }
    return ctr;
}

constexpr double uniform_draw(std::uint64_t seed, std::uint64_t step, std::uint64_t agent) noexcept {
    const Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    const Counter ctr{static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
                      static_cast<std::uint32_t>(agent), static_cast<std::uint32_t>(agent >> 32)};
    const Counter out = philox4x32_10(ctr, key);
    const std::uint64_t bits = (std::uint64_t{out[1]} << 32) | out[0];
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

} // namespace reflexgrid::rng
