#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace probeflow {

// splitmix64 finalizer; used to derive independent seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed for a named purpose (e.g. a task's split) derived from a base seed.
std::uint64_t seed_for(std::uint64_t base, std::string_view tag) noexcept;

// Deterministic generator. mt19937_64's output sequence is fixed by the
// standard; the conversions below avoid the implementation-defined
// std::*_distribution classes so results match across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on the open interval (0, 1).
    double uniform01();
    double uniform(double low, double high) { return low + (high - low) * uniform01(); }
    // Uniform on {0, ..., n-1}; n must be ≥ 1.
    std::size_t uniform_index(std::size_t n);
    // Standard normal via Box-Muller.
    double normal();

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[uniform_index(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace probeflow
