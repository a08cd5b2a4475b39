#include "ghostbench/rng.hpp"

#include <cmath>
#include <numbers>

namespace ghostbench {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(PhiloxCounter& ctr, const PhiloxKey& key) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key.k0, lo1, hi0 ^ ctr[3] ^ key.k1, lo0};
}

} // namespace

PhiloxBlock philox4x32(PhiloxCounter counter, PhiloxKey key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key.k0 += kWeyl0;
            key.k1 += kWeyl1;
        }
        philox_round(counter, key);
    }
    return counter;
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view label) {
    // FNV-1a folds the label into the counter; Philox does the real mixing.
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    const PhiloxBlock out = philox4x32(
        {static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32), 0x5EEDu, 0},
        key_from_seed(root));
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

double uniform_from_words(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t mantissa =
        (static_cast<std::uint64_t>(hi) << 21) ^ (static_cast<std::uint64_t>(lo) >> 11);
    return (static_cast<double>(mantissa & ((1ull << 53) - 1)) + 0.5) * 0x1.0p-53;
}

double gaussian_draw(std::uint64_t seed, std::uint64_t index) {
    const PhiloxBlock out = philox4x32(
        {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
         0x6E6F6973u, 0}, // stream tag keeps noise draws disjoint from pattern bits
        key_from_seed(seed));
    const double u1 = uniform_from_words(out[0], out[1]);
    const double u2 = uniform_from_words(out[2], out[3]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace ghostbench
