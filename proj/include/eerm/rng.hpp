#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace eerm {

/// Deterministic random streams pinned to mt19937_64 with explicit output
/// mapping, so identical seeds reproduce identical datasets everywhere.
/// Uniforms take the top 53 bits of the generator output; normals come from
/// the trigonometric Box-Muller transform. std::*_distribution is avoided
/// on purpose: its algorithms are implementation-defined.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : rng_(seed) {}

    std::uint64_t next_u64() { return rng_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound).
    std::uint64_t uniform_below(std::uint64_t bound) { return rng_() % bound; }

    /// Standard normal.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] keeps the log finite.
        const double u1 = static_cast<double>((rng_() >> 11) + 1) * 0x1.0p-53;
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// In-place Fisher-Yates shuffle.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[uniform_below(i)]);
    }

private:
    std::mt19937_64 rng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace eerm
