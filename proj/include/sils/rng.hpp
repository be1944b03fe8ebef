#pragma once
// Seedable counter-based pseudo-random generator.
//
// Draw k is the SplitMix64 finalizer applied to seed + k * 0x9E3779B97F4A7C15
// (Weyl increment), so the stream depends only on (seed, draw index) and is
// identical across platforms and compilers. Uniforms map the top 53 bits into
// (0, 1]. Gaussians use the Box-Muller transform, two uniform draws per pair;
// GaussianStream::reset_pair() discards a cached second value so that the
// position of later fields in the stream never depends on the parity of
// earlier ones.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sils {

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in (0, 1]
    double next_uniform() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // uniform in [lo, hi)
    double next_uniform(double lo, double hi) {
        return lo + (hi - lo) * (next_uniform() - 0x1.0p-53);
    }

    bool next_sign() { return (next_u64() & 1) != 0; }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

class GaussianStream {
public:
    explicit GaussianStream(CounterRng& rng) : rng_(rng) {}

    double next() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = rng_.next_uniform();
        const double u2 = rng_.next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(2.0 * std::numbers::pi * u2);
        have_cached_ = true;
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

    // field boundary: forget the cached half of a pair
    void reset_pair() { have_cached_ = false; }

private:
    CounterRng& rng_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace sils
