#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hca {

// Deterministic counter-based random streams. Every consumer derives its
// stream from (root seed, index...) so results are independent of evaluation
// order and identical across platforms; the standard <random> distributions
// are implementation-defined and would break bit-reproducibility.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2)));
}

// Sequential generator over a splitmix64 state.
class Stream {
public:
    explicit Stream(std::uint64_t state) : state_(state) {}

    static Stream from(std::uint64_t seed) { return Stream(splitmix64(seed)); }
    static Stream from(std::uint64_t seed, std::uint64_t a) {
        return Stream(mix(splitmix64(seed), a));
    }
    static Stream from(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
        return Stream(mix(mix(splitmix64(seed), a), b));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Uniform on the open interval (0, 1); never returns an endpoint, so it
    // is always safe under log().
    double next_open01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_open01(); }

    // Box-Muller; consumes two uniforms per draw.
    double normal(double mean = 0.0, double stddev = 1.0) {
        const double u1 = next_open01();
        const double u2 = next_open01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
    }

    double lognormal(double mu, double sigma) { return std::exp(normal(mu, sigma)); }

    double gumbel() { return -std::log(-std::log(next_open01())); }

private:
    std::uint64_t state_;
};

} // namespace rng
} // namespace hca
