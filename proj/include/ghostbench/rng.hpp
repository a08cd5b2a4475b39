#ifndef GHOSTBENCH_RNG_HPP
#define GHOSTBENCH_RNG_HPP

#include <array>
#include <cstdint>
#include <string_view>

namespace ghostbench {

/// Counter-based PRNG (Philox4x32-10, Salmon et al. 2011).
///
/// Every random quantity in the toolkit is a pure function of
/// (key, counter), so pattern stacks and noise streams are reproducible
/// across runs, platforms, and generation order.
struct PhiloxKey {
    std::uint32_t k0 = 0;
    std::uint32_t k1 = 0;
};

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxBlock = std::array<std::uint32_t, 4>;

/// One 128-bit block of the Philox4x32-10 stream.
PhiloxBlock philox4x32(PhiloxCounter counter, PhiloxKey key);

/// Splits a 64-bit seed into a Philox key.
inline PhiloxKey key_from_seed(std::uint64_t seed) {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

/// Derives an independent 64-bit sub-seed from (root, label).
/// Used so one experiment-row seed yields unrelated pattern/noise streams.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);

/// Uniform double in (0,1) built from two 32-bit words (53 mantissa bits).
double uniform_from_words(std::uint32_t hi, std::uint32_t lo);

/// Standard normal draw, indexed stream: a pure function of (seed, index).
/// Box-Muller on counter-derived uniforms; no state, any index order.
double gaussian_draw(std::uint64_t seed, std::uint64_t index);

} // namespace ghostbench

#endif
