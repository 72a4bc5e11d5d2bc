#pragma once

#include <cstdint>
#include <random>
#include <vector>

// std::uniform_int_distribution and friends are implementation-defined, so
// seeded runs would not reproduce across standard libraries. Everything that
// needs reproducible randomness goes through these helpers instead.

namespace bibmatch {

inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    return n == 0 ? 0 : rng() % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename T>
void shuffle_vector(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace bibmatch
