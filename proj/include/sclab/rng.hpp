#pragma once

#include <cstdint>
#include <random>

namespace sclab {

// mt19937_64 output is pinned by the standard, so seeded draws reproduce
// across compilers. Distribution adaptors are not pinned, which is why the
// bounded draw below is hand-rolled (rejection sampling, no modulo bias).
using Rng = std::mt19937_64;

inline std::uint64_t uniform_index(Rng& rng, std::uint64_t m) {
    // Uniform over [0, m). m == 0 is a caller bug; mapped to 0 defensively.
    if (m <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % m);
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return v % m;
}

}  // namespace sclab
