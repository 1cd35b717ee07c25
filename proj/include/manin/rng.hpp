#pragma once

#include <cstdint>

namespace manin {

// Counter-based splittable generator (splitmix64 finalizer over seed+counter).
// sample(i) depends only on (seed, i), so any partition of the counter range
// across workers reproduces the same stream.
struct CounterRng {
    std::uint64_t seed;

    explicit CounterRng(std::uint64_t s) : seed(s) {}

    std::uint64_t bits(std::uint64_t counter) const {
        std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform on [0,1)
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }
};

}  // namespace manin
