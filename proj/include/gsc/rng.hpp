#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace gsc {

/// PCG32 (pcg_setseq_64_xsh_rr_32): 64-bit LCG state, 32-bit XSH-RR output.
/// Seeding follows the reference `pcg32_srandom_r`, so sequences match the
/// published generator bit for bit. All library randomness goes through this
/// type; std:: distributions are avoided because their output is
/// implementation-defined.
class Pcg32 {
  public:
    Pcg32(std::uint64_t seed, std::uint64_t stream) noexcept {
        inc_ = (stream << 1u) | 1u;
        state_ = 0;
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint32_t next_u32() noexcept {
        const std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        const auto xorshifted =
            static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        const auto rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    /// Uniform integer in [0, bound), unbiased (rejection on the low range).
    std::uint32_t bounded(std::uint32_t bound) noexcept {
        const std::uint32_t threshold = (0u - bound) % bound;
        for (;;) {
            const std::uint32_t r = next_u32();
            if (r >= threshold)
                return r % bound;
        }
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept {
        const std::uint64_t hi = next_u32() >> 5;
        const std::uint64_t lo = next_u32() >> 6;
        return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; the second variate of each pair is
    /// cached.
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

  private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Stream identifiers; each randomness consumer gets its own PCG stream.
namespace streams {
inline constexpr std::uint64_t mask = 0x6d61736bULL;  // "mask"
inline constexpr std::uint64_t noise = 0x6e6f6973ULL; // "nois"
/// CS block b uses stream cs_base + b.
inline constexpr std::uint64_t cs_base = 0x63730000ULL;
} // namespace streams

} // namespace gsc
