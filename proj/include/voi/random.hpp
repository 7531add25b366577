#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace voi {

using Rng = std::mt19937_64;

/// Named random substreams. Seeds are derived from (master seed, stream, indices)
/// so that results never depend on scheduling order.
enum class Stream : std::uint64_t {
    PriorParams = 0x01,
    PriorThreshold = 0x02,
    Observations = 0x03,
    Mcmc = 0x04,
    PosteriorThreshold = 0x05,
    Chain = 0x06,
    Test = 0xff,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                           std::initializer_list<std::uint64_t> indices = {}) noexcept {
    std::uint64_t h = splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(stream)));
    for (std::uint64_t i : indices) {
        h = splitmix64(h ^ splitmix64(i + 0x632be59bd9b4e019ULL));
    }
    return h;
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

inline double standard_normal(Rng& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    return dist(rng);
}

inline double uniform(Rng& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    return dist(rng);
}

}  // namespace voi
