#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "caco/error.hpp"

namespace caco {

/// Seeded random stream. Distributions are implemented here rather than with
/// <random> distribution classes, whose output is implementation-defined, so a
/// seed produces the same stream on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 1) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). Unbiased (rejection sampling).
    std::size_t index(std::size_t n) {
        if (n == 0) throw Error("Rng::index: empty range");
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do x = engine_();
        while (x >= limit);
        return static_cast<std::size_t>(x % bound);
    }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1;
        do u1 = uniform();
        while (u1 <= 0.0);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
    }

    /// `k` distinct indices from [0, n) in sampling order (partial Fisher-Yates).
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        if (k > n) throw Error("cannot sample " + std::to_string(k) + " of " + std::to_string(n) + " items");
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + index(n - i)]);
        pool.resize(k);
        return pool;
    }

private:
    std::mt19937_64 engine_;
};

/// FNV-1a, used for seed derivation and content fingerprints.
inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace caco
