#pragma once

// Counter-based random streams. Every draw is a pure function of
// (seed, stream, index), so cells and trials can be sampled in any order or
// in parallel and still reproduce the same values.

#include <cstdint>

namespace imprint::rng {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
}

/// Child seed for a named sub-stream, e.g. (master, chip index, checkpoint).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) noexcept {
    return hash(master ^ 0x5eed5eed5eed5eedULL, a, b);
}

/// Uniform in the open interval (0, 1).
double uniform_open(std::uint64_t bits) noexcept;

/// Standard normal draw via Box-Muller on two hashed uniforms.
double standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept;

}  // namespace imprint::rng
