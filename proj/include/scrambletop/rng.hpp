// rng.hpp: counter-based 64-bit generator for reproducible shot sampling
//
// Output k of stream s under seed x is mix64(key(x, s) + k·golden), so any draw can be
// reproduced from (seed, stream, counter) alone and streams never share state.

#pragma once

#include <cstdint>
#include <vector>

namespace scrambletop {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(mix64(seed) ^ (stream + 0x9e3779b97f4a7c15ULL));
}

class CounterRng {
public:
    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(derive_seed(seed, stream)) {}

    constexpr std::uint64_t next_u64() { return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

    // Uniform on [0, 1) with 53 random bits.
    constexpr double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    constexpr std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Multinomial counts of `shots` draws from `probabilities` (need not be normalized) by
// inverse-CDF sampling.
inline std::vector<long> sample_counts(const std::vector<double>& probabilities, long shots,
                                       CounterRng& rng) {
    std::vector<double> cdf(probabilities.size());
    double total = 0.0;
    for (std::size_t k = 0; k < probabilities.size(); ++k) {
        total += probabilities[k] > 0.0 ? probabilities[k] : 0.0;
        cdf[k] = total;
    }
    std::vector<long> counts(probabilities.size(), 0);
    if (probabilities.empty() || !(total > 0.0)) return counts;
    for (long s = 0; s < shots; ++s) {
        const double u = rng.uniform() * total;
        std::size_t lo = 0, hi = cdf.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (u < cdf[mid]) hi = mid;
            else lo = mid + 1;
        }
        ++counts[lo];
    }
    return counts;
}

}  // namespace scrambletop
