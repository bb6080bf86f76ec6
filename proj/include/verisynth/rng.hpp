// SPDX-License-Identifier: Apache-2.0
#ifndef VERISYNTH_RNG_HPP
#define VERISYNTH_RNG_HPP

#include <cmath>
#include <cstdint>

namespace verisynth {

// Counter-based randomness built on splitmix64 finalizers. Every draw
// is a pure function of its key, so parallel samplers get identical
// values regardless of evaluation order, and results are bit-identical
// across platforms (no std::uniform_real_distribution, whose output is
// implementation-defined).

namespace detail {
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t combine(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ (mix64(b) + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}
}  // namespace detail

/// Keyed draw: uniform u64 from up to four key components.
inline std::uint64_t keyed_u64(std::uint64_t k0, std::uint64_t k1 = 0, std::uint64_t k2 = 0,
                               std::uint64_t k3 = 0) {
    std::uint64_t h = detail::mix64(k0);
    h = detail::combine(h, k1);
    h = detail::combine(h, k2);
    h = detail::combine(h, k3);
    return h;
}

/// Keyed draw: uniform double in [0, 1), 53-bit resolution.
inline double keyed_unit(std::uint64_t k0, std::uint64_t k1 = 0, std::uint64_t k2 = 0,
                         std::uint64_t k3 = 0) {
    return static_cast<double>(keyed_u64(k0, k1, k2, k3) >> 11) * 0x1.0p-53;
}

/// Sequential stream for code that draws in a fixed order (mutation,
/// parent selection). Thin counter over the same mixer.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64() { return keyed_u64(seed_, counter_++); }

    /// Uniform in [0, 1).
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, bound). bound must be positive.
    std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

    /// Standard normal via Box–Muller (explicit formula, deterministic).
    double next_gaussian() {
        double u1 = next_unit();
        double u2 = next_unit();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
    }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

/// FNV-1a over bytes; stable across platforms. Used for config and
/// strategy digests in manifests and provenance.
inline std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace verisynth

#endif  // VERISYNTH_RNG_HPP
