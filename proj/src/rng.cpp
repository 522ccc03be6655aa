#include "imprint/rng.hpp"

#include <cmath>
#include <numbers>

namespace imprint::rng {

double uniform_open(std::uint64_t bits) noexcept {
    // 53 random mantissa bits, offset by half a step to exclude 0 and 1.
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
    const std::uint64_t h = hash(seed, stream, index);
    const double u1 = uniform_open(h);
    const double u2 = uniform_open(splitmix64(h ^ 0xa5a5a5a5a5a5a5a5ULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace imprint::rng
