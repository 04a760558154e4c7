#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace rangebound::detail {

// Uniform on [0, 1) from the top 53 bits, so results do not depend on the
// standard library's distribution implementations.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t shard_seed(std::uint64_t seed, std::uint64_t shard) {
    return splitmix64(splitmix64(seed) ^ (shard + 1) * 0xd1b54a32d192ed03ULL);
}

inline std::vector<double> cumulative(const std::vector<double>& prob) {
    std::vector<double> cum(prob.size());
    double s = 0.0;
    for (std::size_t k = 0; k < prob.size(); ++k) cum[k] = (s += prob[k]);
    return cum;
}

inline std::size_t draw_index(const std::vector<double>& cum, double u) {
    const double total = cum.back();
    auto it = std::upper_bound(cum.begin(), cum.end(), u * total);
    if (it == cum.end()) --it;
    return static_cast<std::size_t>(it - cum.begin());
}

}  // namespace rangebound::detail
